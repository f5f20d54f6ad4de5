#pragma once

#include <vector>

#include "flatlab/metric.hpp"

namespace flatlab {

// Coordinate tube [u_lo,u_hi] x [v_lo,v_hi] foliated by coordinate lines:
// u-lines by default (meridians on the sphere chart, r-lines on the torus),
// v-lines when leaves_along_u is false (theta-circles).  Quantities are
// computed by composite Gauss quadrature directly on the fields; no mesh is
// involved.
struct TubeSpec {
    double u_lo = 0.0, u_hi = 1.0;
    double v_lo = 0.0, v_hi = 1.0;
    int leaves = 16;     // sampled leaves (midpoints of transversal cells), even
    int steps = 128;     // quadrature panels along each leaf, even
    int quad_order = 4;
    bool leaves_along_u = true;
    double h0 = 1.0;     // transversal thickness fraction in (0,1]
};

// Leaf-versus-volume comparison.  Domination makes every leaf excess
// Lj - L0 >= 0, and the volume excess controls the summed leaf excesses:
//   volj - vol0 >= h0 * A * sum_k excess_k * dv - slack,
// where A = min over the tube of sqrt(det g0 / g0_leaf) (the base-metric
// transversal density along the foliation) and slack is an explicit
// quadrature-error estimate from coarse/fine comparison.  The chain is how
// length growth along leaves is detected by volume growth.  Refuses
// (InfeasibleError) when the dominating field fails pointwise domination on
// the tube's quadrature samples: without it leaf excesses can be negative
// and the chain says nothing.
struct TubeReport {
    std::vector<double> leaf_v;       // transversal coordinate per leaf
    std::vector<double> leaf_excess;  // Lj - L0 per leaf
    double mean_excess = 0.0;
    double max_excess = 0.0;
    double min_excess = 0.0;
    double vol0 = 0.0;
    double volj = 0.0;
    double voldiff = 0.0;
    double transversal_floor = 0.0;  // A
    double leaf_sum = 0.0;           // sum excess_k * dv
    double chain_rhs = 0.0;          // h0 * A * leaf_sum - slack
    double slack = 0.0;
    double min_domination_eig = 0.0;
    bool chain_ok = false;
};

TubeReport analyze_tube(const MetricField& f0, const MetricField& fj, const TubeSpec& spec);

}  // namespace flatlab
