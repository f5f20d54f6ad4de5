#include "flatlab/flatbound.hpp"

#include <algorithm>
#include <cmath>

namespace flatlab {

double strip_height(double closeness, double diam) {
    if (closeness < 0.0 || diam <= 0.0)
        throw std::invalid_argument("strip_height: need closeness >= 0, diam > 0");
    return std::sqrt(2.0 * closeness * diam + closeness * closeness);
}

double bound_basic(double volj_outside, double height, double vcap) {
    if (volj_outside < 0.0 || height < 0.0 || vcap < 0.0)
        throw std::invalid_argument("bound_basic: negative ingredient");
    return 2.0 * volj_outside + height * vcap;
}

double bound_direct(double closeness, double diam, double volj_outside, double vcap) {
    return bound_basic(volj_outside, strip_height(closeness, diam), vcap);
}

double bound_pipeline(double delta, double lambda, double kappa, double diam, double vol0,
                      double volj, double vcap) {
    if (kappa < 1.0) throw std::invalid_argument("kappa must be >= 1");
    return 2.0 / kappa * vol0 + 2.0 * std::fabs(volj - vol0) +
           strip_height(lambda + delta, diam) * vcap;
}

double bound_bilipschitz(double lambda, double eps, double vol0, int n) {
    if (lambda < 1.0) throw std::invalid_argument("bi-Lipschitz constant must be >= 1");
    if (eps < 0.0) throw std::invalid_argument("distance gap must be >= 0");
    if (n < 1) throw std::invalid_argument("dimension must be >= 1");
    return std::pow(2.0, 0.5 * (n + 1)) * std::pow(lambda, n + 1) * 2.0 * eps * vol0;
}

BilipschitzGate measure_bilipschitz(const LandmarkSet& lm) {
    BilipschitzGate gate;
    const std::size_t L = lm.count();
    for (std::size_t a = 0; a < L; ++a) {
        for (std::size_t b = a + 1; b < L; ++b) {
            const double d0 = lm.d0[a][b];
            const double dj = lm.dj[a][b];
            if (d0 <= 0.0 || dj <= 0.0) continue;
            gate.ratio = std::max({gate.ratio, dj / d0, d0 / dj});
            gate.max_gap = std::max(gate.max_gap, std::fabs(dj - d0));
        }
    }
    return gate;
}

double bound_bilipschitz_certified(const BilipschitzGate& gate, double lambda, double eps,
                                   double vol0, int n) {
    if (!gate.admits(lambda, eps)) {
        throw InfeasibleError("no bi-Lipschitz certificate: measured ratio " +
                              std::to_string(gate.ratio) + ", gap " +
                              std::to_string(gate.max_gap));
    }
    return bound_bilipschitz(lambda, eps, vol0, n);
}

double bound_from_report(const BoundReport& rep) {
    if (rep.formula == "basic") return bound_basic(rep.volj_outside, rep.height, rep.vcap);
    if (rep.formula == "pipeline")
        return bound_pipeline(rep.delta, rep.lambda, rep.kappa, rep.diam, rep.vol0, rep.volj,
                              rep.vcap);
    if (rep.formula == "hls") return bound_bilipschitz(rep.lambda, rep.eps, rep.vol0);
    throw std::invalid_argument("unknown bound formula: " + rep.formula);
}

std::vector<BoundReport> sweep_bounds(const LandmarkSet& lm, const PairSample& ps, double diam,
                                      double vcap, const std::vector<double>& lambda_grid,
                                      const std::vector<double>& kappa_grid) {
    std::vector<BoundReport> out;
    for (double lambda : lambda_grid) {
        for (double kappa : kappa_grid) {
            const double eps = epsilon_for_scale(lm, lambda, kappa);
            if (!(eps > 0.0 && eps < 1.0) || kappa * eps >= 1.0) continue;
            const Selection sel = select_good_set(lm, ps, eps, kappa);
            if (!sel.threshold_strict) continue;

            BoundReport base;
            base.lambda = lambda;
            base.kappa = kappa;
            base.eps = eps;
            base.delta = sel.delta;
            base.diam = diam;
            base.vol0 = lm.vol0;
            base.volj = lm.volj;
            base.volj_outside = sel.volj_outside;
            base.vcap = vcap;
            base.feasible = true;

            // Exhaustive closeness over W pairs: |dj - d0| <= 2c holds on the
            // whole landmark universe's good set by measurement.
            double worst_gap = 0.0;
            const std::size_t L = lm.count();
            for (std::size_t a = 0; a < L; ++a) {
                if (!sel.in_w[a]) continue;
                for (std::size_t b = a + 1; b < L; ++b) {
                    if (!sel.in_w[b]) continue;
                    worst_gap = std::max(worst_gap, std::fabs(lm.dj[a][b] - lm.d0[a][b]));
                }
            }

            BoundReport basic = base;
            basic.formula = "basic";
            basic.closeness = 0.5 * worst_gap;
            basic.height = strip_height(basic.closeness, diam);
            basic.value = bound_basic(sel.volj_outside, basic.height, vcap);
            out.push_back(basic);

            BoundReport pipe = base;
            pipe.formula = "pipeline";
            pipe.closeness = lambda + sel.delta;
            pipe.height = strip_height(pipe.closeness, diam);
            pipe.value = bound_pipeline(sel.delta, lambda, kappa, diam, lm.vol0, lm.volj, vcap);
            out.push_back(pipe);
        }
    }
    std::sort(out.begin(), out.end(), [](const BoundReport& a, const BoundReport& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        if (a.kappa != b.kappa) return a.kappa < b.kappa;
        return a.formula < b.formula;
    });
    return out;
}

}  // namespace flatlab
