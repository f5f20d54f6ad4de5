#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "flatlab/goodset.hpp"
#include "flatlab/metric.hpp"
#include "support/oracles.hpp"

using namespace flatlab;

namespace {

struct Pair {
    std::shared_ptr<const ParamChart> chart;
    MeshGraph graph;
    FieldPtr lo, hi;
    EdgeLengths wl, wu;

    Pair(FieldPtr lower, FieldPtr upper, ChartKind kind, int nu, int nv)
        : chart(ParamChart::make(kind, nu, nv)),
          graph(MeshGraph::build(chart, 2)),
          lo(std::move(lower)),
          hi(std::move(upper)),
          wl(edge_lengths(graph, *lo, 4)),
          wu(edge_lengths(graph, *hi, 4)) {}

    LandmarkSet landmarks(int count, int threads = 1) const {
        return build_landmarks(graph, wl, wu, *lo, *hi, count, 0, {}, threads);
    }
};

// identical metrics: every gap is exactly zero
const Pair& identical() {
    static Pair p(make_round_sphere(1.0), make_round_sphere(1.0), ChartKind::Sphere, 32, 64);
    return p;
}

// wells sphere: distances genuinely disagree near the wells
const Pair& wells() {
    static Pair p(make_round_sphere(1.0),
                  make_well_sphere(default_well_centers(4), 1.0 / 16.0, 1.0),
                  ChartKind::Sphere, 48, 96);
    return p;
}

}  // namespace

TEST_CASE("landmark universe bookkeeping") {
    const LandmarkSet lm = identical().landmarks(10);
    REQUIRE(lm.count() == 10);
    double mass0 = 0.0, massj = 0.0;
    for (double m : lm.mu0) mass0 += m;
    for (double m : lm.muj) massj += m;
    CHECK(mass0 == doctest::Approx(lm.vol0).epsilon(1e-12));
    CHECK(massj == doctest::Approx(lm.volj).epsilon(1e-12));
    // cell masses partition the node-sampled area exactly
    CHECK(lm.vol0 ==
          doctest::Approx(total_volume(*identical().chart, *identical().lo)).epsilon(1e-12));
    for (std::size_t a = 0; a < lm.count(); ++a) {
        CHECK(lm.d0[a][a] == 0.0);
        for (std::size_t b = 0; b < lm.count(); ++b) {
            CHECK(lm.d0[a][b] == doctest::Approx(lm.d0[b][a]).epsilon(1e-9));
            CHECK(lm.dj[a][b] == doctest::Approx(lm.d0[a][b]).epsilon(1e-12));  // same metric
        }
    }
    CHECK(lm.cover_radius > 0.0);
    for (std::size_t n = 0; n < lm.owner.size(); ++n) {
        CHECK(lm.owner_dist[n] <= lm.cover_radius + 1e-12);
    }
}

TEST_CASE("parallel landmark rows equal the serial ones") {
    const LandmarkSet a = wells().landmarks(12, 1);
    const LandmarkSet b = wells().landmarks(12, 4);
    CHECK(a.ids == b.ids);
    for (std::size_t i = 0; i < a.count(); ++i) {
        CHECK(a.d0[i] == b.d0[i]);  // bit-exact: same rows, same order within each row
        CHECK(a.dj[i] == b.dj[i]);
    }
    CHECK(a.mu0 == b.mu0);
}

TEST_CASE("pair universe: weights and the diagonal") {
    const LandmarkSet lm = identical().landmarks(8);
    const PairSample ps = make_pairs(lm);
    CHECK(ps.pairs.size() == 8 * 7 / 2);
    double diag = 0.0;
    for (double m : lm.mu0) diag += m * m;
    CHECK(ps.diag_weight == doctest::Approx(diag).epsilon(1e-12));
    CHECK(ps.total_weight == doctest::Approx(lm.vol0 * lm.vol0).epsilon(1e-12));
    double acc = ps.diag_weight;
    for (const auto& p : ps.pairs) {
        CHECK(p.weight == doctest::Approx(2.0 * lm.mu0[p.a] * lm.mu0[p.b]).epsilon(1e-12));
        CHECK(p.gap >= 0.0);
        acc += p.weight;
    }
    CHECK(acc == doctest::Approx(ps.total_weight).epsilon(1e-12));
}

TEST_CASE("identical metrics select everything with zero threshold") {
    const LandmarkSet lm = identical().landmarks(10);
    const PairSample ps = make_pairs(lm);
    const Selection sel = select_good_set(lm, ps, 0.05, 2.0);
    CHECK(sel.delta == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sel.vol0_outside == 0.0);
    CHECK(sel.volj_outside == 0.0);
    CHECK(sel.masses_dominated);
    CHECK(sel.threshold_strict);
    for (char w : sel.in_w) CHECK(w == 1);
    const GoodSetCheck chk = verify_good_set(lm, sel, ps, 0.1, 0.0, kPi);
    CHECK(chk.ok);
    CHECK(chk.worst_excess <= 0.0 + 1e-12);
    CHECK(chk.min_intersection > chk.intersection_bound);
}

TEST_CASE("retention threshold shrinks as eps grows") {
    const LandmarkSet lm = wells().landmarks(32);
    const PairSample ps = make_pairs(lm);
    const Selection tight = select_good_set(lm, ps, 0.01, 2.0);
    const Selection loose = select_good_set(lm, ps, 0.2, 2.0);
    CHECK(tight.delta >= loose.delta - 1e-12);
    CHECK(tight.retained_weight > (1.0 - 0.01) * ps.total_weight - 1e-9);
    CHECK(loose.retained_weight > (1.0 - 0.2) * ps.total_weight - 1e-9);
}

TEST_CASE("selection rejects an empty threshold and flags weak ones") {
    const LandmarkSet lm = identical().landmarks(6);
    const PairSample ps = make_pairs(lm);
    CHECK_THROWS_AS((void)select_good_set(lm, ps, 0.5, 2.0), std::invalid_argument);
    const Selection weak = select_good_set(lm, ps, 0.3, 2.0);  // kappa*eps = 0.6 >= 1/2
    CHECK_FALSE(weak.threshold_strict);
}

TEST_CASE("smallest lambda-ball mass and the derived eps on the round sphere") {
    // On the unit round sphere the mass of a radius-(pi/2) ball is the
    // hemisphere, 2*pi, so eps = 2*pi / (2 * kappa * 4*pi) = 1/(4 kappa); at
    // kappa = 2 that is 1/8.
    const LandmarkSet lm = identical().landmarks(64);

    // The cell-granular ball is only exact up to the covering radius: it
    // contains every cell whose landmark the ball reaches, so it brackets the
    // true cap between the radius -+ cover caps.
    const double ball = min_ball_mass(lm, 0.5 * kPi);
    CHECK(ball >= oracle::cap_area(0.5 * kPi - lm.cover_radius) - 1e-9);
    CHECK(ball <= oracle::cap_area(0.5 * kPi + lm.cover_radius) + 1e-9);
    const double eps = epsilon_for_scale(lm, 0.5 * kPi, 2.0);
    CHECK(eps == doctest::Approx(ball / (4.0 * lm.vol0)).epsilon(1e-12));

    // The node-granular ball resolves the cap itself; at this resolution the
    // residual error is the stencil's distance overshoot plus one cell band.
    const double nball = min_node_ball_mass(identical().graph, identical().wl, *identical().lo,
                                            lm.ids, 0.5 * kPi);
    CHECK(nball == doctest::Approx(oracle::cap_area(0.5 * kPi)).epsilon(0.06));
    CHECK(nball / (2.0 * 2.0 * lm.vol0) == doctest::Approx(0.125).epsilon(0.06));
}

TEST_CASE("good set excises well-anchored landmarks and bounds the bad set") {
    const LandmarkSet lm = wells().landmarks(64);
    const PairSample ps = make_pairs(lm);
    const double kappa = 2.0;
    const double eps = epsilon_for_scale(lm, 0.4, kappa);
    REQUIRE(eps > 0.0);
    REQUIRE(eps < 1.0);
    const Selection sel = select_good_set(lm, ps, eps, kappa);

    std::size_t excised = 0;
    for (char w : sel.in_w) excised += w == 0;
    CHECK(excised > 0);                              // the wells are detected
    CHECK(excised < lm.count());                     // but not everything
    CHECK(sel.vol0_outside < lm.vol0 / kappa);       // Chebyshev bound
    CHECK(sel.vol0_outside > 0.0);

    // retained closeness holds on W pairs with the measured allowance
    const GoodSetCheck chk = verify_good_set(lm, sel, ps, 0.4, 0.01, kPi + 2.0);
    CHECK(chk.ok);
    CHECK(chk.pairs_checked > 0);
    CHECK(chk.min_intersection > chk.intersection_bound - 1e-9 * lm.vol0);
}

TEST_CASE("landmark count validation") {
    CHECK_THROWS_AS((void)identical().landmarks(1), std::invalid_argument);
}
