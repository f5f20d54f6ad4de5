#pragma once

#include <cstddef>
#include <vector>

#include "flatlab/graph.hpp"
#include "flatlab/metric.hpp"

namespace flatlab {

struct DominationReport {
    bool ok = false;
    double min_eig = 0.0;  // smallest generalized eigenvalue of (lower, upper) seen
    Vec2 worst;            // where it was attained
};

// Pointwise domination upper >= (1 - slack) * lower as quadratic forms, sampled
// at every node and every edge quadrature point of the graph.  Passing means
// the edge quadrature used downstream sees only dominated integrands, so graph
// distances and volumes inherit the ordering exactly.  A float-slack of 1e-9
// below the threshold still counts as dominated.
DominationReport check_dominates(const MetricField& upper, const MetricField& lower,
                                 const MeshGraph& g, int quad_order, double slack = 0.0);

// Per-node generalized eigenvalues of g_b relative to g_a.
struct TensorComparison {
    std::vector<double> lambda_min;        // one entry per grid node
    std::vector<double> lambda_max;
    double global_min = 0.0;
    double global_max = 0.0;
    std::vector<std::size_t> violations;   // nodes with lambda_min < 1 - slack
    double slack = 0.0;

    // Length-ratio certificate: |v|_b <= q() |v|_a for every tangent vector at
    // every sampled node.
    double q() const;
};

TensorComparison compare_eigs(const MetricField& g_a, const MetricField& g_b,
                              const ParamChart& chart, double slack = 0.0);

// sup over node + edge-quadrature samples of sqrt(lambda_max(lower^{-1} upper)):
// the stretch factor certifying upper-metric lengths <= factor * lower-metric
// lengths along every curve.
double sup_stretch(const MetricField& upper, const MetricField& lower, const MeshGraph& g,
                   int quad_order);

// ( integral ||lower^{-1}(upper - lower)||_F^p dVol_lower )^{1/p}, the relative
// L^p size of the excess, node-sampled.  p >= 1.
double lp_excess(const MetricField& upper, const MetricField& lower, const ParamChart& chart,
                 double p);

}  // namespace flatlab
