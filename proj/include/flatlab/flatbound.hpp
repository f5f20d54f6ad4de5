#pragma once

#include <string>
#include <vector>

#include "flatlab/goodset.hpp"

namespace flatlab {

// Strip height needed so that a detour through the floor never undercuts a
// ceiling distance: with dj <= d0 + 2c on the glued set and d0 <= D,
// h = sqrt(2 c D + c^2) closes the triangle estimate (h >= c, and
// d^2 + h^2 >= (d + c)^2 for every d <= D).
double strip_height(double closeness, double diam);

// Filling-volume estimate for the flat distance between the two metrics on
// one surface, from a glued set of closeness c and height h = strip_height:
//   bound = 2 * Vol_j(M \ W) + h * V.
double bound_basic(double volj_outside, double height, double vcap);

// bound_basic with the height derived from a measured closeness.
double bound_direct(double closeness, double diam, double volj_outside, double vcap);

// Same estimate with Vol_j(M\W) replaced by its a-priori bound
// vol0/kappa + |volj - vol0| and closeness by the good-set guarantee
// lambda + delta.
double bound_pipeline(double delta, double lambda, double kappa, double diam, double vol0,
                      double volj, double vcap);

// Bi-Lipschitz comparison estimate in dimension n: if identity maps are
// lambda-bi-Lipschitz and distances differ by at most eps uniformly, the flat
// distance is at most 2^{(n+1)/2} lambda^{n+1} * 2 eps * vol0.
double bound_bilipschitz(double lambda, double eps, double vol0, int n = 2);

// Measured certificate that the identity map between the two distance
// matrices is lambda-bi-Lipschitz with uniform gap eps.  Without an admitting
// certificate the bi-Lipschitz estimate refuses to evaluate.
struct BilipschitzGate {
    double ratio = 0.0;    // max over landmark pairs of max(dj/d0, d0/dj)
    double max_gap = 0.0;  // max over landmark pairs of |dj - d0|
    bool admits(double lambda, double eps) const {
        return ratio <= lambda + 1e-12 && max_gap <= eps + 1e-12;
    }
};

BilipschitzGate measure_bilipschitz(const LandmarkSet& lm);

double bound_bilipschitz_certified(const BilipschitzGate& gate, double lambda, double eps,
                                   double vol0, int n = 2);

struct BoundReport {
    std::string formula;  // "basic", "pipeline" or "hls"
    std::string family;   // optional provenance
    int j = 0;
    double lambda = 0.0;
    double kappa = 0.0;
    double eps = 0.0;
    double delta = 0.0;
    double closeness = 0.0;  // the c fed to strip_height
    double height = 0.0;
    double diam = 0.0;
    double tau = 0.0;  // mesh tolerance the diameter was inflated by
    double vol0 = 0.0;
    double volj = 0.0;
    double volj_outside = 0.0;
    double vcap = 0.0;
    double value = 0.0;
    bool feasible = false;
};

// Re-evaluates the stored formula from the report's own fields; agreement
// with `value` to 1e-12 is an invariant of every report producer.
double bound_from_report(const BoundReport& rep);

// Sweep the (lambda, kappa) grid; at each point derive eps from the smallest
// lambda-ball, run the selection, and evaluate both estimates: the pipeline
// form, and the basic form with the closeness measured exhaustively over
// W-landmark pairs (which is exact for the landmark universe).  Returns every
// feasible grid evaluation, best first; ties prefer smaller lambda, then
// smaller kappa.
std::vector<BoundReport> sweep_bounds(const LandmarkSet& lm, const PairSample& ps, double diam,
                                      double vcap, const std::vector<double>& lambda_grid,
                                      const std::vector<double>& kappa_grid);

}  // namespace flatlab
