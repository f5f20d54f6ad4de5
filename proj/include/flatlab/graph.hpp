#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "flatlab/chart.hpp"

namespace flatlab {

// Undirected graph edge.  The segment is anchor + t*disp for t in [0,1] in
// chart coordinates; metric lengths integrate along that segment.  anchor is
// endpoint a's coordinate (for pole edges, the pole's u with the partner's v
// -- at a pole every azimuth names the same point).
struct Edge {
    std::int32_t a = 0;
    std::int32_t b = 0;
    Vec2 anchor;
    Vec2 disp;
};

// Primitive index directions (p,q) with gcd(|p|,|q|)=1 and max(|p|,|q|) <= k,
// one representative per +-pair.  k=1,2,3 give 4, 8, 16 directions (node
// degree 8, 16, 32 away from boundaries).
std::vector<std::pair<int, int>> stencil_directions(int k);

class MeshGraph {
public:
    static MeshGraph build(std::shared_ptr<const ParamChart> chart, int stencil);

    const ParamChart& chart() const { return *chart_; }
    const std::shared_ptr<const ParamChart>& chart_ptr() const { return chart_; }
    int stencil() const { return stencil_; }
    std::size_t n_nodes() const { return chart_->n_nodes(); }
    const std::vector<Edge>& edges() const { return edges_; }

    struct Incidence {
        std::int32_t nbr;
        std::int32_t eid;
    };
    // CSR incidence: neighbors of n are adj()[adj_off()[n] .. adj_off()[n+1]).
    const std::vector<std::int64_t>& adj_off() const { return adj_off_; }
    const std::vector<Incidence>& adj() const { return adj_; }

    std::uint64_t content_hash() const;

private:
    std::shared_ptr<const ParamChart> chart_;
    int stencil_ = 1;
    std::vector<Edge> edges_;
    std::vector<std::int64_t> adj_off_;
    std::vector<Incidence> adj_;
};

}  // namespace flatlab
