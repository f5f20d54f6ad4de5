#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "doctest.h"
#include "flatlab/chart.hpp"
#include "flatlab/graph.hpp"
#include "support/oracles.hpp"

using namespace flatlab;

TEST_CASE("torus dual areas tile the parameter square exactly") {
    const auto chart = ParamChart::make(ChartKind::Torus, 64, 64);
    REQUIRE(chart->n_nodes() == 64 * 64);
    const double cell = (kTwoPi / 64) * (kTwoPi / 64);
    double sum = 0.0;
    for (std::size_t i = 0; i < chart->n_nodes(); ++i) {
        CHECK(chart->dual_area(i) == doctest::Approx(cell).epsilon(1e-12));
        sum += chart->dual_area(i);
    }
    CHECK(sum == doctest::Approx(kTwoPi * kTwoPi).epsilon(1e-12));
}

TEST_CASE("sphere chart: poles, node count, dual-area total") {
    const auto chart = ParamChart::make(ChartKind::Sphere, 32, 64);
    CHECK(chart->n_nodes() == 32 * 64 + 2);
    CHECK(chart->north_pole() == 32 * 64);
    CHECK(chart->south_pole() == 32 * 64 + 1);
    CHECK(chart->dual_area(chart->north_pole()) == 0.0);
    CHECK(chart->dual_area(chart->south_pole()) == 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < chart->n_nodes(); ++i) sum += chart->dual_area(i);
    // Parameter-domain area pi * 2pi, independent of refinement.
    CHECK(sum == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-12));

    const Vec2 np = chart->node_coord(chart->north_pole());
    const Vec2 sp = chart->node_coord(chart->south_pole());
    CHECK(np.u == 0.0);
    CHECK(sp.u == kPi);
}

TEST_CASE("axis cells: centers between bounds, widths consistent") {
    const auto chart = ParamChart::make(ChartKind::Sphere, 16, 32);
    const Axis& u = chart->axis_u();
    REQUIRE(u.bounds.size() == u.ncells() + 1);
    CHECK(u.bounds.front() == 0.0);
    CHECK(u.bounds.back() == doctest::Approx(kPi).epsilon(1e-15));
    for (std::size_t i = 0; i < u.ncells(); ++i) {
        CHECK(u.centers[i] == doctest::Approx(0.5 * (u.bounds[i] + u.bounds[i + 1])));
        CHECK(u.widths[i] == doctest::Approx(u.bounds[i + 1] - u.bounds[i]));
        CHECK(u.widths[i] > 0.0);
    }
    CHECK(std::is_sorted(u.centers.begin(), u.centers.end()));
}

TEST_CASE("refinement band splits cells and keeps grading") {
    RefineBand band;
    band.axis = 0;
    band.center = 0.5 * kPi;
    band.half_width = 0.2;
    band.factor = 4;
    const auto chart = ParamChart::make(ChartKind::Sphere, 32, 64, {band});
    const Axis& u = chart->axis_u();
    const double base = kPi / 32;

    // Inside the band every cell is a quarter of the base width.
    bool saw_fine = false;
    for (std::size_t i = 0; i < u.ncells(); ++i) {
        if (std::fabs(u.centers[i] - band.center) < band.half_width - base) {
            CHECK(u.widths[i] == doctest::Approx(base / 4).epsilon(1e-12));
            saw_fine = true;
        }
    }
    CHECK(saw_fine);
    // Graded transition: adjacent widths never jump by more than 2x.
    for (std::size_t i = 0; i + 1 < u.ncells(); ++i) {
        const double r = u.widths[i + 1] / u.widths[i];
        CHECK(r <= 2.0 + 1e-12);
        CHECK(r >= 0.5 - 1e-12);
    }
    // Total still tiles [0, pi].
    double w = 0.0;
    for (double x : u.widths) w += x;
    CHECK(w == doctest::Approx(kPi).epsilon(1e-12));

    // More cells than the unrefined chart.
    CHECK(u.ncells() > 32);
}

TEST_CASE("identical construction gives identical content hash") {
    RefineBand band;
    band.axis = 0;
    band.center = 1.0;
    band.half_width = 0.1;
    band.factor = 8;
    const auto a = ParamChart::make(ChartKind::Sphere, 24, 48, {band});
    const auto b = ParamChart::make(ChartKind::Sphere, 24, 48, {band});
    CHECK(a->content_hash() == b->content_hash());
    const auto c = ParamChart::make(ChartKind::Sphere, 25, 48, {band});
    CHECK(a->content_hash() != c->content_hash());
}

TEST_CASE("invalid refinement is rejected") {
    RefineBand a;
    a.axis = 0;
    a.center = 1.0;
    a.half_width = 0.3;
    a.factor = 4;
    RefineBand b = a;
    b.center = 1.2;  // overlaps a on the same axis
    CHECK_THROWS_AS((void)ParamChart::make(ChartKind::Sphere, 32, 64, {a, b}),
                    std::invalid_argument);
    RefineBand bad = a;
    bad.factor = 1;
    CHECK_THROWS_AS((void)ParamChart::make(ChartKind::Sphere, 32, 64, {bad}),
                    std::invalid_argument);
}

TEST_CASE("stencil directions match the primitive-vector count") {
    for (int k = 1; k <= 3; ++k) {
        const auto dirs = stencil_directions(k);
        CHECK(static_cast<int>(dirs.size()) == oracle::primitive_direction_count(k));
        std::set<std::pair<int, int>> seen;
        for (auto [p, q] : dirs) {
            CHECK(std::max(std::abs(p), std::abs(q)) <= k);
            CHECK(std::gcd(std::abs(p), std::abs(q)) == 1);
            CHECK(!seen.count({p, q}));
            CHECK(!seen.count({-p, -q}));  // one representative per +-pair
            seen.insert({p, q});
        }
    }
    CHECK(stencil_directions(1).size() == 4);
    CHECK(stencil_directions(2).size() == 8);
    CHECK(stencil_directions(3).size() == 16);
    CHECK_THROWS_AS((void)stencil_directions(0), std::invalid_argument);
    CHECK_THROWS_AS((void)stencil_directions(4), std::invalid_argument);
}

TEST_CASE("torus interior degree doubles the direction count") {
    const auto chart = ParamChart::make(ChartKind::Torus, 16, 16);
    const MeshGraph g = MeshGraph::build(chart, 2);
    // Fully periodic and uniform: every node has the full 16-neighborhood.
    for (std::size_t n = 0; n < g.n_nodes(); ++n) {
        CHECK(g.adj_off()[n + 1] - g.adj_off()[n] == 16);
    }
    // Handshake: edge count = degree sum / 2.
    CHECK(g.edges().size() == g.n_nodes() * 16 / 2);
}

TEST_CASE("sphere poles connect to their full adjacent ring") {
    const auto chart = ParamChart::make(ChartKind::Sphere, 16, 32);
    const MeshGraph g = MeshGraph::build(chart, 2);
    const std::size_t np = chart->north_pole();
    const std::size_t deg = g.adj_off()[np + 1] - g.adj_off()[np];
    CHECK(deg == 32);  // one spoke per cell of the first interior ring
    const std::size_t sp = chart->south_pole();
    CHECK(g.adj_off()[sp + 1] - g.adj_off()[sp] == 32);
}

TEST_CASE("edge segments connect their endpoint coordinates") {
    const auto chart = ParamChart::make(ChartKind::Torus, 12, 12);
    const MeshGraph g = MeshGraph::build(chart, 2);
    for (const Edge& e : g.edges()) {
        const Vec2 ca = chart->node_coord(e.a);
        const Vec2 cb = chart->node_coord(e.b);
        const Vec2 end = e.anchor + e.disp;
        // Anchor is endpoint a; endpoint b may differ by whole periods.
        CHECK(e.anchor.u == doctest::Approx(ca.u).epsilon(1e-12));
        CHECK(e.anchor.v == doctest::Approx(ca.v).epsilon(1e-12));
        CHECK(std::remainder(end.u - cb.u, kTwoPi) == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(std::remainder(end.v - cb.v, kTwoPi) == doctest::Approx(0.0).epsilon(1e-9));
    }
}

TEST_CASE("periodic axis too small for the stencil is rejected") {
    const auto chart = ParamChart::make(ChartKind::Torus, 4, 4);
    CHECK_THROWS_AS((void)MeshGraph::build(chart, 2), std::invalid_argument);
    CHECK_NOTHROW((void)MeshGraph::build(chart, 1));
}

TEST_CASE("graph content hash tracks chart and stencil") {
    const auto chart = ParamChart::make(ChartKind::Torus, 12, 12);
    const MeshGraph a = MeshGraph::build(chart, 1);
    const MeshGraph b = MeshGraph::build(chart, 2);
    CHECK(a.content_hash() != b.content_hash());
    const MeshGraph c = MeshGraph::build(chart, 1);
    CHECK(a.content_hash() == c.content_hash());
}
