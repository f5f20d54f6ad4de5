#include "flatlab/compare.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace flatlab {

namespace {

// Node and edge-quadrature sample points of the graph.  Pole nodes are
// skipped: the sphere chart is degenerate there (sin u = 0) and every
// quantity we sample is defined through quadratic forms on SPD tensors.
template <typename F>
void for_each_sample(const MeshGraph& g, int quad_order, F&& fn) {
    const ParamChart& chart = g.chart();
    for (std::size_t id = 0; id < chart.grid_nodes(); ++id) fn(chart.node_coord(id));
    for (const Edge& e : g.edges()) {
        for (const GaussPoint& gp : gauss_rule(quad_order)) {
            fn(e.anchor + gp.t * e.disp);
        }
    }
}

}  // namespace

DominationReport check_dominates(const MetricField& upper, const MetricField& lower,
                                 const MeshGraph& g, int quad_order, double slack) {
    if (slack < 0.0) throw std::invalid_argument("check_dominates: slack must be >= 0");
    DominationReport rep;
    rep.min_eig = std::numeric_limits<double>::infinity();
    for_each_sample(g, quad_order, [&](Vec2 p) {
        const auto eig = pencil_eigs(lower.eval(p), upper.eval(p));
        if (eig[0] < rep.min_eig) {
            rep.min_eig = eig[0];
            rep.worst = p;
        }
    });
    // The float slack scales nothing: eigenvalue roundoff grows with tensor
    // magnitude (deep wells reach ~1e4), so a flat 1e-9 keeps exact-domination
    // families from tripping the gate at any resolution while still catching
    // every violation a rescaling slack is meant to absorb.
    rep.ok = rep.min_eig >= 1.0 - slack - 1e-9;
    return rep;
}

double TensorComparison::q() const { return std::sqrt(global_max); }

TensorComparison compare_eigs(const MetricField& g_a, const MetricField& g_b,
                              const ParamChart& chart, double slack) {
    if (slack < 0.0) throw std::invalid_argument("compare_eigs: slack must be >= 0");
    TensorComparison cmp;
    cmp.slack = slack;
    const std::size_t n = chart.grid_nodes();
    cmp.lambda_min.resize(n);
    cmp.lambda_max.resize(n);
    cmp.global_min = std::numeric_limits<double>::infinity();
    cmp.global_max = -std::numeric_limits<double>::infinity();
    for (std::size_t id = 0; id < n; ++id) {
        const Vec2 x = chart.node_coord(id);
        const auto eig = pencil_eigs(g_a.eval(x), g_b.eval(x));
        cmp.lambda_min[id] = eig[0];
        cmp.lambda_max[id] = eig[1];
        cmp.global_min = std::min(cmp.global_min, eig[0]);
        cmp.global_max = std::max(cmp.global_max, eig[1]);
        if (eig[0] < 1.0 - slack) cmp.violations.push_back(id);
    }
    return cmp;
}

double sup_stretch(const MetricField& upper, const MetricField& lower, const MeshGraph& g,
                   int quad_order) {
    double worst = 0.0;
    for_each_sample(g, quad_order, [&](Vec2 p) {
        const auto eig = pencil_eigs(lower.eval(p), upper.eval(p));
        worst = std::max(worst, eig[1]);
    });
    return std::sqrt(worst);
}

double lp_excess(const MetricField& upper, const MetricField& lower, const ParamChart& chart,
                 double p) {
    if (p < 1.0) throw std::invalid_argument("lp_excess: p must be >= 1");
    double acc = 0.0;
    for (std::size_t id = 0; id < chart.grid_nodes(); ++id) {
        const Vec2 x = chart.node_coord(id);
        const Mat2 lo = lower.eval(x);
        const Mat2 diff = upper.eval(x) - lo;
        const auto eig = pencil_eigs(lo, diff);
        const double frob = std::sqrt(eig[0] * eig[0] + eig[1] * eig[1]);
        acc += std::pow(frob, p) * std::sqrt(lo.det()) * chart.dual_area(id);
    }
    return std::pow(acc, 1.0 / p);
}

}  // namespace flatlab
