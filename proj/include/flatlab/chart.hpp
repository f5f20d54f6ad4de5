#pragma once

#include <memory>
#include <string>
#include <vector>

#include "flatlab/util.hpp"

namespace flatlab {

enum class ChartKind { Sphere, Torus };

// One coordinate axis of a cell-centered grid.  Nodes sit at cell centers;
// cell widths need not be uniform (banded refinement), but adjacent widths
// never differ by more than a factor of two.
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool periodic = false;
    std::vector<double> bounds;   // ncells()+1, bounds.front()==lo, bounds.back()==hi
    std::vector<double> centers;  // ncells()
    std::vector<double> widths;   // ncells()

    std::size_t ncells() const { return centers.size(); }
    double period() const { return hi - lo; }

    // Center of cell `raw` on the covering line (periodic axes unwrap by
    // whole periods, so consecutive raw indices give monotone coordinates).
    double unwrapped_center(long long raw) const;
};

// Refinement band: cells of one axis meeting [center-half_width, center+half_width]
// are split into `factor` subcells, with the factor decaying by halves (rounded
// up) cell-by-cell away from the band until it reaches 1.
struct RefineBand {
    int axis = 0;  // 0 = u, 1 = v
    double center = 0.0;
    double half_width = 0.0;
    int factor = 2;
};

// Product chart for a closed surface.
//   Sphere: u = polar angle in (0,pi) cell-centered, plus two pole vertices
//           carrying zero dual area; v = azimuth in [-pi,pi) periodic.
//   Torus:  u, v both in [-pi,pi) periodic.
// Dual areas are coordinate cell areas (width_u * width_v); their total is the
// exact parameter-domain area regardless of refinement.
class ParamChart {
public:
    static std::shared_ptr<const ParamChart> make(ChartKind kind, int nu, int nv,
                                                  const std::vector<RefineBand>& bands = {});

    ChartKind kind() const { return kind_; }
    const Axis& axis_u() const { return u_; }
    const Axis& axis_v() const { return v_; }

    std::size_t grid_nodes() const { return u_.ncells() * v_.ncells(); }
    std::size_t n_nodes() const { return grid_nodes() + (kind_ == ChartKind::Sphere ? 2 : 0); }
    bool has_poles() const { return kind_ == ChartKind::Sphere; }
    std::size_t north_pole() const { return grid_nodes(); }
    std::size_t south_pole() const { return grid_nodes() + 1; }

    std::size_t node_index(std::size_t iu, std::size_t iv) const { return iu * v_.ncells() + iv; }
    Vec2 node_coord(std::size_t id) const;
    double dual_area(std::size_t id) const;  // poles carry zero

    // Canonical JSON descriptor (sorted keys), the chart's cache identity.
    std::string descriptor() const;
    std::uint64_t content_hash() const { return fnv1a64(descriptor()); }

private:
    ChartKind kind_;
    Axis u_, v_;
    int base_nu_ = 0, base_nv_ = 0;
    std::vector<RefineBand> bands_;
};

}  // namespace flatlab
