#pragma once

#include <cstdint>
#include <vector>

#include "flatlab/geodesy.hpp"

namespace flatlab {

// The glued comparison space: the surface under the base metric forms the
// floor, the full surface times [0, height] rises over it as a slab whose
// horizontal structure carries dominating-metric lengths, and the surface
// under the dominating metric is attached along the slab's top -- but only
// over the masked region (the closure of the good set).  Dominating-metric
// nodes outside the mask live in a detached copy that reaches the slab only
// through masked top nodes.  Diagonal slab edges keep the product structure
// honest: without them a vertical excursion would cost horizontal + vertical
// instead of the hypotenuse, and an undersized strip could not be detected.
struct ZSpec {
    std::vector<char> mask;  // per graph node: node lies in the glued region
    double height = 0.0;     // slab height, > 0
    int levels = 3;          // slab node layers including floor and top, >= 2
};

class ZGraph {
public:
    static ZGraph build(const MeshGraph& g, const EdgeLengths& w0, const EdgeLengths& wj,
                        const ZSpec& spec);

    std::size_t n() const { return n_total_; }
    std::size_t n_base() const { return n_base_; }
    int levels() const { return levels_; }
    double height() const { return height_; }
    double dz() const { return height_ / (levels_ - 1); }
    bool mask_empty() const { return mask_empty_; }

    // Node addressing.  The floor doubles as slab level 0.
    std::size_t floor_id(std::size_t node) const { return node; }
    std::size_t slab_id(std::size_t node, int level) const {
        return static_cast<std::size_t>(level) * n_base_ + node;
    }
    std::size_t top_id(std::size_t node) const { return slab_id(node, levels_ - 1); }
    // Image of a dominating-metric point: masked nodes are identified with
    // their top-slab node, unmasked ones live in the detached copy.
    std::size_t mj_id(std::size_t node) const;

    std::vector<double> distances(std::size_t source) const;

private:
    struct Arc {
        std::int64_t to;
        double len;
    };
    std::size_t n_total_ = 0;
    std::size_t n_base_ = 0;
    int levels_ = 0;
    double height_ = 0.0;
    bool mask_empty_ = false;
    std::vector<char> mask_;
    std::vector<std::size_t> copy_rank_;  // unmasked node -> index of its detached copy
    std::vector<std::int64_t> off_;
    std::vector<Arc> arcs_;
};

// Structural and quantitative certificate over the sampled base nodes:
//  * floor isometry: the slab never shortens floor distances (horizontal slab
//    edges are never shorter than floor edges and climbing costs extra);
//  * ceiling domination: distances between dominating-metric images never
//    exceed the dominating-metric graph distances (every such path is
//    replicated on the top layer and the detached copy);
//  * shortfall: descending through the slab undercuts a dominating-metric
//    distance by at most `shortfall_allowance` -- the quantity the good-set
//    inequality guarantees.  A slab too short for its good set fails here.
//  * column: floor-to-top along one column equals the height exactly.
// `height_required` is the minimum admissible height computed by the caller
// from (delta, diameter); a shorter slab is reported as a hypothesis failure
// rather than silently tested.
struct ZCertificate {
    double max_floor_error = 0.0;      // |dZ(floor,floor) - d0|
    double max_ceiling_overrun = 0.0;  // dZ(mj,mj) - dj, positive part
    double max_shortfall = 0.0;        // dj - dZ(mj,mj), positive part
    double max_column_excess = 0.0;    // |dZ(floor x, top x) - height|
    double shortfall_allowance = 0.0;
    double height_required = 0.0;
    bool hypothesis_ok = true;
    bool mask_empty = false;
    std::size_t pairs_checked = 0;
    bool ok = false;
};

ZCertificate verify_zspace(const MeshGraph& g, const EdgeLengths& w0, const EdgeLengths& wj,
                           const ZSpec& spec, const std::vector<std::size_t>& samples,
                           double shortfall_allowance, double height_required = 0.0);

}  // namespace flatlab
