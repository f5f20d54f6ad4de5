#include "flatlab/tubes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace flatlab {

namespace {

// Pullback under (u,v) -> (v,u): lets one foliation routine serve both
// coordinate directions.
class SwappedField final : public MetricField {
public:
    explicit SwappedField(const MetricField& base) : base_(base) {}
    Mat2 eval(Vec2 p) const override {
        const Mat2 m = base_.eval({p.v, p.u});
        return {m.yy, m.xy, m.xx};
    }
    std::string descriptor() const override { return "swapped(" + base_.descriptor() + ")"; }

private:
    const MetricField& base_;
};

struct TubeSums {
    std::vector<double> leaf_v, leaf_excess;
    double vol0 = 0.0, volj = 0.0;
    double floor_a = std::numeric_limits<double>::infinity();
    double min_eig = std::numeric_limits<double>::infinity();
    double leaf_sum = 0.0;
};

double leaf_length(const MetricField& f, double v, double u_lo, double u_hi, int steps, int q) {
    const double du = (u_hi - u_lo) / steps;
    double acc = 0.0;
    for (int s = 0; s < steps; ++s) {
        const double a = u_lo + s * du;
        for (const GaussPoint& gp : gauss_rule(q)) {
            acc += gp.w * du * std::sqrt(std::max(f.eval({a + gp.t * du, v}).xx, 0.0));
        }
    }
    return acc;
}

TubeSums tube_sums(const MetricField& f0, const MetricField& fj, const TubeSpec& spec,
                   int leaves, int steps) {
    TubeSums out;
    const double dv = (spec.v_hi - spec.v_lo) / leaves;
    const double du = (spec.u_hi - spec.u_lo) / steps;
    out.leaf_v.resize(static_cast<std::size_t>(leaves));
    out.leaf_excess.resize(static_cast<std::size_t>(leaves));
    for (int k = 0; k < leaves; ++k) {
        const double v = spec.v_lo + (k + 0.5) * dv;
        out.leaf_v[static_cast<std::size_t>(k)] = v;
        const double l0 = leaf_length(f0, v, spec.u_lo, spec.u_hi, steps, spec.quad_order);
        const double lj = leaf_length(fj, v, spec.u_lo, spec.u_hi, steps, spec.quad_order);
        out.leaf_excess[static_cast<std::size_t>(k)] = lj - l0;
        out.leaf_sum += (lj - l0) * dv;
        // Volume over the v-cell of this leaf, tensor Gauss per u-panel.
        for (int s = 0; s < steps; ++s) {
            const double ua = spec.u_lo + s * du;
            const double va = spec.v_lo + k * dv;
            for (const GaussPoint& gu : gauss_rule(spec.quad_order)) {
                for (const GaussPoint& gv : gauss_rule(spec.quad_order)) {
                    const Vec2 p{ua + gu.t * du, va + gv.t * dv};
                    const double w = gu.w * gv.w * du * dv;
                    const Mat2 m0 = f0.eval(p);
                    const Mat2 mj = fj.eval(p);
                    out.vol0 += w * std::sqrt(std::max(m0.det(), 0.0));
                    out.volj += w * std::sqrt(std::max(mj.det(), 0.0));
                    out.min_eig = std::min(out.min_eig, pencil_eigs(m0, mj)[0]);
                    if (m0.xx > 0.0) {
                        out.floor_a = std::min(out.floor_a, std::sqrt(m0.det() / m0.xx));
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace

TubeReport analyze_tube(const MetricField& f0, const MetricField& fj, const TubeSpec& spec) {
    if (!(spec.u_hi > spec.u_lo) || !(spec.v_hi > spec.v_lo))
        throw std::invalid_argument("tube bounds must be increasing");
    if (spec.leaves < 2 || spec.leaves % 2 != 0)
        throw std::invalid_argument("tube needs an even leaf count >= 2");
    if (spec.steps < 2 || spec.steps % 2 != 0)
        throw std::invalid_argument("tube needs an even step count >= 2");
    if (!(spec.h0 > 0.0 && spec.h0 <= 1.0))
        throw std::invalid_argument("transversal thickness fraction must be in (0,1]");

    if (!spec.leaves_along_u) {
        TubeSpec sw = spec;
        sw.u_lo = spec.v_lo;
        sw.u_hi = spec.v_hi;
        sw.v_lo = spec.u_lo;
        sw.v_hi = spec.u_hi;
        sw.leaves_along_u = true;
        const SwappedField s0(f0), sj(fj);
        return analyze_tube(s0, sj, sw);
    }

    const TubeSums fine = tube_sums(f0, fj, spec, spec.leaves, spec.steps);
    if (fine.min_eig < 1.0 - 1e-9) {
        throw InfeasibleError("tube requires pointwise domination on its samples; min eig " +
                              std::to_string(fine.min_eig));
    }
    const TubeSums coarse = tube_sums(f0, fj, spec, spec.leaves / 2, spec.steps / 2);

    TubeReport rep;
    rep.leaf_v = fine.leaf_v;
    rep.leaf_excess = fine.leaf_excess;
    rep.vol0 = fine.vol0;
    rep.volj = fine.volj;
    rep.voldiff = fine.volj - fine.vol0;
    rep.transversal_floor = fine.floor_a;
    rep.leaf_sum = fine.leaf_sum;
    rep.min_domination_eig = fine.min_eig;
    rep.max_excess = *std::max_element(rep.leaf_excess.begin(), rep.leaf_excess.end());
    rep.min_excess = *std::min_element(rep.leaf_excess.begin(), rep.leaf_excess.end());
    rep.mean_excess = std::accumulate(rep.leaf_excess.begin(), rep.leaf_excess.end(), 0.0) /
                      static_cast<double>(rep.leaf_excess.size());
    rep.slack = std::fabs(rep.voldiff - (coarse.volj - coarse.vol0)) +
                spec.h0 * fine.floor_a * std::fabs(fine.leaf_sum - coarse.leaf_sum) + 1e-12;
    rep.chain_rhs = spec.h0 * fine.floor_a * fine.leaf_sum - rep.slack;
    rep.chain_ok = rep.voldiff >= rep.chain_rhs;
    return rep;
}

}  // namespace flatlab
