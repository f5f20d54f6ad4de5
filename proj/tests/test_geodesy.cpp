#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "flatlab/cache.hpp"
#include "flatlab/geodesy.hpp"
#include "flatlab/metric.hpp"
#include "support/oracles.hpp"

using namespace flatlab;

namespace {

struct SphereFixture {
    std::shared_ptr<const ParamChart> chart = ParamChart::make(ChartKind::Sphere, 48, 96);
    MeshGraph graph = MeshGraph::build(chart, 2);
    FieldPtr round = make_round_sphere(1.0);
    EdgeLengths w = edge_lengths(graph, *round, 4);
};

const SphereFixture& sphere() {
    static SphereFixture f;
    return f;
}

}  // namespace

TEST_CASE("segment lengths against closed forms") {
    const auto flat = make_warped_torus(profile_constant(1.0));
    CHECK(segment_length(*flat, {0.0, 0.0}, {0.3, 0.4}) == doctest::Approx(0.5).epsilon(1e-12));
    const auto five = make_warped_torus(profile_constant(5.0));
    CHECK(segment_length(*five, {0.1, 0.2}, {0.3, 0.4}) ==
          doctest::Approx(std::hypot(0.3, 5.0 * 0.4)).epsilon(1e-12));
}

TEST_CASE("pole-to-pole distance on the round sphere is pi") {
    const auto& f = sphere();
    const double d = graph_distance(f.graph, f.w, f.chart->north_pole(), f.chart->south_pole());
    CHECK(d == doctest::Approx(kPi).epsilon(1e-9));
}

TEST_CASE("sphere graph distances track great circles within a few percent") {
    const auto& f = sphere();
    const auto marks = farthest_point_sample(f.graph, f.w, 12, 0);
    double worst = 0.0, mean = 0.0;
    int cnt = 0;
    for (std::size_t a = 0; a < marks.size(); ++a) {
        const auto row = dijkstra(f.graph, f.w, marks[a]);
        for (std::size_t b = a + 1; b < marks.size(); ++b) {
            const double truth = oracle::great_circle(f.chart->node_coord(marks[a]),
                                                      f.chart->node_coord(marks[b]));
            if (truth < 0.2) continue;
            const double rel = std::fabs(row[marks[b]] - truth) / truth;
            worst = std::max(worst, rel);
            mean += rel;
            ++cnt;
            // a graph path is a curve on the sphere: never shorter than exact
            CHECK(row[marks[b]] >= truth - 1e-9);
        }
    }
    REQUIRE(cnt > 20);
    mean /= cnt;
    CHECK(mean < 0.03);
    CHECK(worst < 0.05);
}

TEST_CASE("distance matrix axioms on landmark rows") {
    const auto& f = sphere();
    const auto marks = farthest_point_sample(f.graph, f.w, 8, 0);
    std::vector<std::vector<double>> d;
    for (std::size_t m : marks) d.push_back(dijkstra(f.graph, f.w, m));
    for (std::size_t a = 0; a < marks.size(); ++a) {
        CHECK(d[a][marks[a]] == 0.0);
        for (std::size_t b = 0; b < marks.size(); ++b) {
            CHECK(d[a][marks[b]] == doctest::Approx(d[b][marks[a]]).epsilon(1e-9));
            for (std::size_t c = 0; c < marks.size(); ++c) {
                CHECK(d[a][marks[b]] <= d[a][marks[c]] + d[c][marks[b]] + 1e-9);
            }
        }
    }
}

TEST_CASE("domination transfers to distances, volumes, and the edge ratio") {
    const auto& f = sphere();
    const auto bigger = make_scaled(f.round, 1.44);  // lengths x1.2
    const EdgeLengths wu = edge_lengths(f.graph, *bigger, 4);
    REQUIRE(wu.len.size() == f.w.len.size());
    for (std::size_t e = 0; e < wu.len.size(); ++e) CHECK(wu.len[e] >= f.w.len[e] - 1e-12);

    CHECK(max_edge_ratio(wu, f.w) == doctest::Approx(1.2).epsilon(1e-12));

    const auto d0 = dijkstra(f.graph, f.w, 0);
    const auto dj = dijkstra(f.graph, wu, 0);
    for (std::size_t n = 0; n < d0.size(); n += 97) {
        CHECK(dj[n] >= d0[n] - 1e-12);
        CHECK(dj[n] <= 1.2 * d0[n] + 1e-12);  // Q-bound
    }

    CHECK(total_volume(*f.chart, *bigger) ==
          doctest::Approx(1.44 * total_volume(*f.chart, *f.round)).epsilon(1e-12));
}

TEST_CASE("sphere and torus volumes against closed forms") {
    const auto fine = ParamChart::make(ChartKind::Sphere, 128, 256);
    const auto round = make_round_sphere(1.0);
    CHECK(total_volume(*fine, *round) == doctest::Approx(4.0 * kPi).epsilon(0.005));

    // flat metrics are integrated exactly by the midpoint rule
    const auto torus = ParamChart::make(ChartKind::Torus, 64, 64);
    const auto five = make_warped_torus(profile_constant(5.0));
    CHECK(total_volume(*torus, *five) ==
          doctest::Approx(5.0 * kTwoPi * kTwoPi).epsilon(1e-12));
}

TEST_CASE("masked volume splits cleanly and validates its mask") {
    const auto& f = sphere();
    std::vector<std::uint8_t> north(f.chart->n_nodes(), 0), south(f.chart->n_nodes(), 0);
    for (std::size_t i = 0; i < f.chart->n_nodes(); ++i) {
        (f.chart->node_coord(i).u < 0.5 * kPi ? north : south)[i] = 1;
    }
    const double vn = total_volume(*f.chart, *f.round, north);
    const double vs = total_volume(*f.chart, *f.round, south);
    CHECK(vn + vs == doctest::Approx(total_volume(*f.chart, *f.round)).epsilon(1e-12));
    CHECK(vn == doctest::Approx(2.0 * kPi).epsilon(0.01));  // hemisphere
    CHECK(total_volume(*f.chart, *f.round, std::vector<std::uint8_t>(f.chart->n_nodes(), 0)) ==
          0.0);
    CHECK_THROWS_AS((void)total_volume(*f.chart, *f.round, std::vector<std::uint8_t>(3, 1)),
                    std::invalid_argument);
}

TEST_CASE("farthest point sampling is deterministic and spread out") {
    const auto& f = sphere();
    const auto a = farthest_point_sample(f.graph, f.w, 6, 0);
    const auto b = farthest_point_sample(f.graph, f.w, 6, 0);
    CHECK(a == b);
    REQUIRE(a.size() == 6);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) CHECK(a[i] != a[j]);
    }
    // the second sample maximizes distance from the first
    const auto row = dijkstra(f.graph, f.w, a[0]);
    double best = 0.0;
    for (double x : row) best = std::max(best, x);
    CHECK(row[a[1]] == doctest::Approx(best));
    CHECK(farthest_point_sample(f.graph, f.w, 3, 7)[0] == 7 % f.graph.n_nodes());
}

TEST_CASE("voronoi partition assigns nearest seeds") {
    const auto& f = sphere();
    const auto seeds = farthest_point_sample(f.graph, f.w, 5, 0);
    const VoronoiAssign va = voronoi_partition(f.graph, f.w, seeds);
    std::vector<std::vector<double>> rows;
    for (std::size_t s : seeds) rows.push_back(dijkstra(f.graph, f.w, s));
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        CHECK(va.owner[seeds[s]] == static_cast<std::int32_t>(s));
        CHECK(va.dist[seeds[s]] == 0.0);
    }
    for (std::size_t n = 0; n < f.graph.n_nodes(); n += 131) {
        const std::int32_t o = va.owner[n];
        CHECK(va.dist[n] == doctest::Approx(rows[o][n]).epsilon(1e-12));
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            CHECK(rows[o][n] <= rows[s][n] + 1e-12);
        }
    }
}

TEST_CASE("diameter estimate brackets the sphere diameter") {
    const auto& f = sphere();
    const double d = diameter_estimate(f.graph, f.w, 8, 0);
    CHECK(d >= kPi - 1e-9);    // eccentricities are true distances
    CHECK(d <= 1.02 * kPi);    // discretization overshoot stays small
    CHECK_THROWS_AS((void)diameter_estimate(f.graph, f.w, 1, 0), std::invalid_argument);
}

TEST_CASE("nearest node snaps coordinates and resolves poles by polar angle") {
    const auto& f = sphere();
    for (std::size_t id : {std::size_t(0), std::size_t(777), std::size_t(3000)}) {
        CHECK(nearest_node(*f.chart, f.chart->node_coord(id)) == id);
    }
    CHECK(nearest_node(*f.chart, {0.001, 2.5}) == f.chart->north_pole());
    CHECK(nearest_node(*f.chart, {kPi - 0.001, -2.5}) == f.chart->south_pole());
}

TEST_CASE("curve length: quarter turns and degenerate input") {
    const auto& f = sphere();
    std::vector<Vec2> arc;
    for (int i = 0; i <= 200; ++i) arc.push_back({0.5 * kPi, 0.5 * kPi * i / 200.0});
    CHECK(curve_length(*f.round, arc) == doctest::Approx(0.5 * kPi).epsilon(1e-10));
    CHECK(curve_length(*f.round, {}) == 0.0);
    CHECK(curve_length(*f.round, {{1.0, 1.0}}) == 0.0);
}

TEST_CASE("mesh tolerance decreases with resolution and is memoized") {
    const double t32 = mesh_tolerance(32, 2, 4);
    const double t64 = mesh_tolerance(64, 2, 4);
    CHECK(t32 > 0.0);
    CHECK(t64 < t32);
    CHECK(mesh_tolerance(32, 2, 4) == t32);  // same cached value
    // wider stencils help at fixed resolution
    CHECK(mesh_tolerance(32, 3, 4) < t32);
}

TEST_CASE("distance cache: round trip, descriptor guard, cold-warm equality") {
    const auto dir = std::filesystem::temp_directory_path() / "flatlab_cache_test";
    std::filesystem::remove_all(dir);
    {
        const DistanceCache cache(dir);
        REQUIRE(cache.enabled());

        const std::vector<double> data{1.0, 2.5, -3.25, 0.0};
        CHECK_FALSE(cache.load("key-a").has_value());
        cache.store("key-a", data);
        const auto back = cache.load("key-a");
        REQUIRE(back.has_value());
        CHECK(*back == data);  // bit-exact
        CHECK_FALSE(cache.load("key-b").has_value());  // different descriptor misses

        CHECK_FALSE(DistanceCache{}.enabled());
        CHECK_FALSE(DistanceCache{}.load("key-a").has_value());
    }
    {
        // cold vs warm dijkstra through the cache agree bit-exactly
        const auto chart = ParamChart::make(ChartKind::Sphere, 24, 48);
        const MeshGraph g = MeshGraph::build(chart, 2);
        const auto round = make_round_sphere(1.0);
        const EdgeLengths w = edge_lengths(g, *round, 4);
        const DistanceCache cache(dir);
        const auto cold = cached_dijkstra(g, w, 17, cache);
        const auto plain = dijkstra(g, w, 17);
        CHECK(cold == plain);
        const auto warm = cached_dijkstra(g, w, 17, cache);
        CHECK(warm == cold);
    }
    std::filesystem::remove_all(dir);
}
