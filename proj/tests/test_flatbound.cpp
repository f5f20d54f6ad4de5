#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "flatlab/flatbound.hpp"
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

    LandmarkSet landmarks(int count) const {
        return build_landmarks(graph, wl, wu, *lo, *hi, count, 0, {}, 1);
    }
};

const Pair& identical() {
    static Pair p(make_round_sphere(1.0), make_round_sphere(1.0), ChartKind::Sphere, 24, 48);
    return p;
}

// flat torus against its conformal 1.2-stretch: ratio certificate is exactly 1.2
const Pair& stretched() {
    static Pair p(make_warped_torus(profile_constant(1.0)),
                  make_scaled(make_warped_torus(profile_constant(1.0)), 1.44), ChartKind::Torus,
                  24, 24);
    return p;
}

// two polar wells of radius 1/4 and excess 1: distances differ only near the poles
const Pair& wells() {
    static Pair p(make_round_sphere(1.0), make_well_sphere(default_well_centers(2), 0.25, 1.0),
                  ChartKind::Sphere, 48, 96);
    return p;
}

}  // namespace

TEST_CASE("strip height closes the detour triangle") {
    const double c = 0.1, diam = kPi;
    const double h = strip_height(c, diam);
    CHECK(h == doctest::Approx(std::sqrt(2.0 * c * diam + c * c)).epsilon(1e-15));
    CHECK(std::fabs(h - 0.79895) <= 1e-5);

    // the defining property: h >= c and d^2 + h^2 >= (d + c)^2 up to d = diam
    CHECK(h >= c);
    for (double d : {0.0, 0.5, 1.0, 2.0, diam}) {
        CHECK(d * d + h * h >= (d + c) * (d + c) - 1e-12);
    }
    CHECK(diam * diam + h * h == doctest::Approx((diam + c) * (diam + c)).epsilon(1e-12));

    CHECK(strip_height(0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(strip_height(-0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(strip_height(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("filling estimate arithmetic") {
    const double vcap = 4.0 * kPi;
    const double h = strip_height(0.1, kPi);
    const double v = bound_basic(0.2, h, vcap);
    CHECK(v == doctest::Approx(2.0 * 0.2 + h * vcap).epsilon(1e-15));
    CHECK(std::fabs(v - 10.4405) <= 1e-3);

    CHECK(bound_direct(0.1, kPi, 0.2, vcap) == doctest::Approx(v).epsilon(1e-15));

    CHECK_THROWS_AS(bound_basic(-0.1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_basic(0.1, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_basic(0.1, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("pipeline estimate arithmetic") {
    const double delta = 0.05, lambda = 0.2, kappa = 4.0, diam = kPi;
    const double vol0 = 4.0 * kPi, volj = 4.0 * kPi + 0.3, vcap = 4.0 * kPi;
    const double v = bound_pipeline(delta, lambda, kappa, diam, vol0, volj, vcap);
    const double expect =
        2.0 / kappa * vol0 + 2.0 * 0.3 + strip_height(lambda + delta, diam) * vcap;
    CHECK(v == doctest::Approx(expect).epsilon(1e-15));

    // volume deficit counts the same as surplus
    CHECK(bound_pipeline(delta, lambda, kappa, diam, vol0, vol0 - 0.3, vcap) ==
          doctest::Approx(v).epsilon(1e-15));

    CHECK_THROWS_AS(bound_pipeline(delta, lambda, 0.5, diam, vol0, volj, vcap),
                    std::invalid_argument);
}

TEST_CASE("bi-Lipschitz estimate at the frozen reference point") {
    const double v = bound_bilipschitz(1.2, 0.1, 4.0 * kPi, 2);
    const double expect = std::pow(2.0, 1.5) * std::pow(1.2, 3) * 2.0 * 0.1 * 4.0 * kPi;
    CHECK(v == doctest::Approx(expect).epsilon(1e-15));
    CHECK(std::fabs(v - 12.2836827) <= 1e-6);

    // dimension dependence: n = 1 drops one factor of sqrt(2)*lambda
    CHECK(bound_bilipschitz(1.2, 0.1, 4.0 * kPi, 1) ==
          doctest::Approx(v / (std::sqrt(2.0) * 1.2)).epsilon(1e-12));

    CHECK_THROWS_AS(bound_bilipschitz(0.9, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_bilipschitz(1.2, -0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_bilipschitz(1.2, 0.1, 1.0, 0), std::invalid_argument);
}

TEST_CASE("bi-Lipschitz gate measures and refuses") {
    const BilipschitzGate same = measure_bilipschitz(identical().landmarks(10));
    CHECK(same.ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(same.max_gap <= 1e-12);
    CHECK(same.admits(1.05, 1e-6));
    CHECK(bound_bilipschitz_certified(same, 1.05, 1e-6, 4.0 * kPi) ==
          doctest::Approx(bound_bilipschitz(1.05, 1e-6, 4.0 * kPi)).epsilon(1e-15));

    const BilipschitzGate gate = measure_bilipschitz(stretched().landmarks(10));
    CHECK(gate.ratio == doctest::Approx(1.2).epsilon(1e-9));
    CHECK(gate.max_gap > 0.1);
    CHECK_FALSE(gate.admits(1.1, 10.0));
    CHECK_THROWS_AS(bound_bilipschitz_certified(gate, 1.1, 10.0, 1.0), InfeasibleError);
    CHECK(gate.admits(1.25, gate.max_gap + 0.01));
}

TEST_CASE("sweep reports are self-consistent and sorted") {
    const LandmarkSet lm = wells().landmarks(48);
    const PairSample ps = make_pairs(lm);
    const double diam = diameter_estimate(wells().graph, wells().wl);
    const double vcap = 4.0 * kPi;
    const std::vector<BoundReport> reps =
        sweep_bounds(lm, ps, diam, vcap, {0.2, 0.4, 0.8}, {2.0, 4.0});
    REQUIRE(!reps.empty());

    bool saw_basic = false, saw_pipeline = false;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const BoundReport& r = reps[i];
        CHECK(r.feasible);
        CHECK(r.value > 0.0);
        // every report re-evaluates from its own fields
        CHECK(std::fabs(bound_from_report(r) - r.value) <= 1e-12);
        saw_basic = saw_basic || r.formula == "basic";
        saw_pipeline = saw_pipeline || r.formula == "pipeline";
        if (i > 0) {
            CHECK(reps[i - 1].value <= r.value + 1e-15);
            if (reps[i - 1].value == r.value) {
                const bool tie_ordered =
                    reps[i - 1].lambda < r.lambda ||
                    (reps[i - 1].lambda == r.lambda &&
                     (reps[i - 1].kappa < r.kappa ||
                      (reps[i - 1].kappa == r.kappa && reps[i - 1].formula <= r.formula)));
                CHECK(tie_ordered);
            }
        }
    }
    CHECK(saw_basic);
    CHECK(saw_pipeline);

    // the basic form's measured closeness never exceeds the pipeline guarantee
    for (const BoundReport& r : reps) {
        if (r.formula != "basic") continue;
        CHECK(r.closeness <= r.lambda + r.delta + 1e-12);
    }
}

TEST_CASE("an infeasible grid sweeps to nothing") {
    const LandmarkSet lm = identical().landmarks(12);
    const PairSample ps = make_pairs(lm);
    // lambda beyond the diameter: the smallest ball is everything, eps = 1/(2 kappa),
    // and kappa * eps = 1/2 fails the strict-threshold requirement at every point
    const std::vector<BoundReport> reps = sweep_bounds(lm, ps, 100.0, 4.0 * kPi, {50.0}, {4.0});
    CHECK(reps.empty());
}

TEST_CASE("unknown formula tag is rejected") {
    BoundReport rep;
    rep.formula = "mystery";
    CHECK_THROWS_AS(bound_from_report(rep), std::invalid_argument);
}
