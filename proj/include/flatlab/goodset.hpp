#pragma once

#include <cstdint>
#include <vector>

#include "flatlab/cache.hpp"
#include "flatlab/geodesy.hpp"

namespace flatlab {

// Finite measured universe standing in for the surface: farthest-point
// landmarks under the base metric, each weighted by the base-metric area of
// its graph-Voronoi cell.  Landmark weights therefore sum to the full
// base-metric area exactly, and cell weights under the dominating metric give
// exact set-volume bookkeeping for any union of cells.
struct LandmarkSet {
    std::vector<std::size_t> ids;          // node ids in selection order
    std::vector<std::vector<double>> d0;   // landmark-to-landmark, base metric
    std::vector<std::vector<double>> dj;   // landmark-to-landmark, dominating metric
    std::vector<double> mu0;               // Voronoi cell areas, base metric
    std::vector<double> muj;               // Voronoi cell areas, dominating metric
    std::vector<std::int32_t> owner;       // node -> landmark index
    std::vector<double> owner_dist;        // node -> distance to its landmark (base metric)
    double cover_radius = 0.0;             // max over nodes of owner_dist
    double vol0 = 0.0;                     // sum mu0 == base area of the surface
    double volj = 0.0;                     // sum muj

    std::size_t count() const { return ids.size(); }
};

// The per-landmark distance rows are independent single-source problems; with
// threads > 1 they are computed concurrently (results are identical to the
// serial order because each row lands in its own slot).
LandmarkSet build_landmarks(const MeshGraph& g, const EdgeLengths& w0, const EdgeLengths& wj,
                            const MetricField& f0, const MetricField& fj, int count,
                            unsigned seed, const DistanceCache& cache = {}, int threads = 1);

// Unordered off-diagonal landmark pairs with product weights 2 mu_a mu_b and
// absolute distance gaps |dj - d0|.  The diagonal mass sum mu^2 (pairs of a
// point with itself, gap 0) is carried implicitly and is always retained.
struct PairSample {
    struct Pair {
        std::int32_t a, b;
        double gap;
        double weight;
    };
    std::vector<Pair> pairs;
    double diag_weight = 0.0;
    double total_weight = 0.0;  // (sum mu0)^2
};

PairSample make_pairs(const LandmarkSet& lm);

// Measured uniform-closeness selection: retain pairs in ascending gap order
// (always including the diagonal) until the retained product measure exceeds
// (1-eps) of the total; pairs tied with the last admitted gap are retained
// too, so the threshold delta is a well-defined gap level.  A landmark joins
// the good set W when the measure of its retained partners (itself included)
// exceeds (1 - kappa*eps) of the universe.
struct Selection {
    double eps = 0.0;
    double kappa = 0.0;
    double delta = 0.0;            // largest retained gap
    std::vector<char> retained;    // per pair
    std::vector<double> slice;     // per landmark: mu_p + retained partners' mu_q
    std::vector<char> in_w;        // per landmark
    double retained_weight = 0.0;  // diagonal + retained pair weights; > (1-eps) total
    double vol0_outside = 0.0;     // base area of cells outside W; < vol0 / kappa
    double volj_outside = 0.0;     // dominating-metric area of cells outside W
    bool masses_dominated = false; // muj >= mu0 cellwise; enables the volj_outside bound
    bool threshold_strict = true;  // kappa*eps < 1/2: common-partner argument applies
};

// Besides building the selection this asserts the measure-theoretic chain it
// rests on (InvariantError if numerics ever broke them): the retained product
// measure exceeds (1-eps) of the total; the bad set has base area < vol0/kappa;
// and, when every cell's dominating-metric mass is at least its base mass,
// volj_outside <= vol0/kappa + (volj - vol0).
Selection select_good_set(const LandmarkSet& lm, const PairSample& ps, double eps, double kappa);

// Smallest landmark-measured ball: min over landmarks p of the mu0-mass of
// {q : d0(p,q) <= radius}.  Cell-granular: the value brackets the smallest
// true ball mass only up to balls of radius +- cover_radius.
double min_ball_mass(const LandmarkSet& lm, double radius);

// Node-granular version for cross-checks against closed-form ball areas: min
// over the given centers of the base-metric mass of nodes within `radius` by
// graph distance.  One Dijkstra per center.
double min_node_ball_mass(const MeshGraph& g, const EdgeLengths& w0, const MetricField& f0,
                          const std::vector<std::size_t>& centers, double radius);

// eps chosen so that a radius-lambda ball always outweighs twice the allowed
// bad-partner mass: eps = min_ball(lambda) / (2 kappa vol0).  Then any two
// good-set points share a retained partner within lambda of the first, giving
// dj(p,q) <= d0(p,q) + 2(lambda + delta) on W.
double epsilon_for_scale(const LandmarkSet& lm, double lambda, double kappa);

// Exhaustive check of that inequality over W-landmark pairs, with a
// discretization allowance of 2*tau*diam, plus the common-partner mass bound
// it rests on: any two W-landmarks' retained-partner sets overlap in measure
// more than (1 - 2 kappa eps) vol0.
struct GoodSetCheck {
    bool ok = false;
    double worst_excess = 0.0;        // max over W pairs of |dj - d0| - 2(lambda + delta)
    double allowance = 0.0;
    double min_intersection = 0.0;    // min over W pairs of common retained-partner mass
    double intersection_bound = 0.0;  // (1 - 2 kappa eps) vol0
    std::size_t pairs_checked = 0;
};

GoodSetCheck verify_good_set(const LandmarkSet& lm, const Selection& sel, const PairSample& ps,
                             double lambda, double tau, double diam);

}  // namespace flatlab
