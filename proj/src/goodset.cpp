#include "flatlab/goodset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace flatlab {

LandmarkSet build_landmarks(const MeshGraph& g, const EdgeLengths& w0, const EdgeLengths& wj,
                            const MetricField& f0, const MetricField& fj, int count,
                            unsigned seed, const DistanceCache& cache, int threads) {
    if (count < 2) throw std::invalid_argument("a single landmark has no pair universe");
    LandmarkSet lm;
    lm.ids = farthest_point_sample(g, w0, count, seed);
    const std::size_t L = lm.ids.size();

    const VoronoiAssign va = voronoi_partition(g, w0, lm.ids);
    lm.owner = va.owner;
    lm.owner_dist = va.dist;
    lm.cover_radius = *std::max_element(va.dist.begin(), va.dist.end());

    const ParamChart& chart = g.chart();
    lm.mu0.assign(L, 0.0);
    lm.muj.assign(L, 0.0);
    for (std::size_t id = 0; id < chart.grid_nodes(); ++id) {
        const Vec2 p = chart.node_coord(id);
        const double area = chart.dual_area(id);
        const auto own = static_cast<std::size_t>(lm.owner[id]);
        lm.mu0[own] += std::sqrt(std::max(f0.eval(p).det(), 0.0)) * area;
        lm.muj[own] += std::sqrt(std::max(fj.eval(p).det(), 0.0)) * area;
    }
    lm.vol0 = std::accumulate(lm.mu0.begin(), lm.mu0.end(), 0.0);
    lm.volj = std::accumulate(lm.muj.begin(), lm.muj.end(), 0.0);

    lm.d0.resize(L);
    lm.dj.resize(L);
    const auto fill_row = [&](std::size_t i) {
        const std::vector<double> r0 = cached_dijkstra(g, w0, lm.ids[i], cache);
        const std::vector<double> rj = cached_dijkstra(g, wj, lm.ids[i], cache);
        lm.d0[i].resize(L);
        lm.dj[i].resize(L);
        for (std::size_t k = 0; k < L; ++k) {
            lm.d0[i][k] = r0[lm.ids[k]];
            lm.dj[i][k] = rj[lm.ids[k]];
        }
    };
    const auto nworkers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), L);
    if (nworkers <= 1) {
        for (std::size_t i = 0; i < L; ++i) fill_row(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mu;
        std::vector<std::thread> pool;
        pool.reserve(nworkers);
        for (std::size_t t = 0; t < nworkers; ++t) {
            pool.emplace_back([&] {
                try {
                    for (std::size_t i = next.fetch_add(1); i < L; i = next.fetch_add(1))
                        fill_row(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (std::thread& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }
    return lm;
}

PairSample make_pairs(const LandmarkSet& lm) {
    PairSample ps;
    const std::size_t L = lm.count();
    ps.pairs.reserve(L * (L - 1) / 2);
    for (std::size_t a = 0; a < L; ++a) {
        ps.diag_weight += lm.mu0[a] * lm.mu0[a];
        for (std::size_t b = a + 1; b < L; ++b) {
            PairSample::Pair p;
            p.a = static_cast<std::int32_t>(a);
            p.b = static_cast<std::int32_t>(b);
            // Symmetrize (Dijkstra from a and from b agree up to roundoff),
            // then take the absolute gap: closeness is two-sided.
            p.gap = std::fabs(0.5 * ((lm.dj[a][b] + lm.dj[b][a]) - (lm.d0[a][b] + lm.d0[b][a])));
            p.weight = 2.0 * lm.mu0[a] * lm.mu0[b];
            ps.pairs.push_back(p);
        }
    }
    ps.total_weight = lm.vol0 * lm.vol0;
    return ps;
}

Selection select_good_set(const LandmarkSet& lm, const PairSample& ps, double eps, double kappa) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must be in (0,1)");
    if (kappa < 1.0) throw std::invalid_argument("kappa must be >= 1");
    if (kappa * eps >= 1.0) throw std::invalid_argument("kappa*eps >= 1: good-set threshold empty");

    Selection sel;
    sel.eps = eps;
    sel.kappa = kappa;
    sel.threshold_strict = kappa * eps < 0.5 - 1e-12;
    sel.retained.assign(ps.pairs.size(), 0);

    std::vector<std::size_t> order(ps.pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto& px = ps.pairs[x];
        const auto& py = ps.pairs[y];
        if (px.gap != py.gap) return px.gap < py.gap;
        if (px.a != py.a) return px.a < py.a;
        return px.b < py.b;
    });

    const double target = (1.0 - eps) * ps.total_weight;
    double cum = ps.diag_weight;
    sel.delta = 0.0;
    std::size_t i = 0;
    for (; i < order.size(); ++i) {
        if (cum > target) break;
        const auto& p = ps.pairs[order[i]];
        sel.retained[order[i]] = 1;
        cum += p.weight;
        sel.delta = p.gap;
    }
    for (; i < order.size() && ps.pairs[order[i]].gap == sel.delta; ++i) {
        sel.retained[order[i]] = 1;
    }

    const std::size_t L = lm.count();
    sel.slice = lm.mu0;  // each landmark is its own retained partner
    for (std::size_t k = 0; k < ps.pairs.size(); ++k) {
        if (!sel.retained[k]) continue;
        const auto& p = ps.pairs[k];
        sel.slice[static_cast<std::size_t>(p.a)] += lm.mu0[static_cast<std::size_t>(p.b)];
        sel.slice[static_cast<std::size_t>(p.b)] += lm.mu0[static_cast<std::size_t>(p.a)];
    }
    sel.in_w.assign(L, 0);
    const double bar = (1.0 - kappa * eps) * lm.vol0;
    for (std::size_t a = 0; a < L; ++a) {
        if (sel.slice[a] > bar) {
            sel.in_w[a] = 1;
        } else {
            sel.vol0_outside += lm.mu0[a];
            sel.volj_outside += lm.muj[a];
        }
    }
    sel.retained_weight = cum;

    // The chain this selection feeds is theorem-backed; if any link fails the
    // numerics are broken, not the input.
    const double tol = 1e-9 * ps.total_weight;
    double slice_mass = 0.0;
    for (std::size_t a = 0; a < L; ++a) slice_mass += lm.mu0[a] * sel.slice[a];
    if (!(slice_mass > (1.0 - eps) * ps.total_weight - tol))
        throw InvariantError("retained slice measure fell below the (1-eps) target");
    if (!(sel.vol0_outside <= lm.vol0 / kappa + 1e-9 * lm.vol0))
        throw InvariantError("bad-set base area exceeds vol0/kappa");

    sel.masses_dominated = true;
    for (std::size_t a = 0; a < L; ++a) {
        if (lm.muj[a] < lm.mu0[a] - 1e-9 * lm.vol0) sel.masses_dominated = false;
    }
    if (sel.masses_dominated &&
        !(sel.volj_outside <=
          lm.vol0 / kappa + (lm.volj - lm.vol0) + 1e-9 * (lm.vol0 + lm.volj)))
        throw InvariantError("bad-set dominated-metric area exceeds vol0/kappa + volume excess");
    return sel;
}

double min_ball_mass(const LandmarkSet& lm, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("ball radius must be positive");
    const std::size_t L = lm.count();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < L; ++p) {
        double mass = 0.0;
        for (std::size_t q = 0; q < L; ++q) {
            if (lm.d0[p][q] <= radius) mass += lm.mu0[q];
        }
        best = std::min(best, mass);
    }
    return best;
}

double epsilon_for_scale(const LandmarkSet& lm, double lambda, double kappa) {
    if (kappa < 1.0) throw std::invalid_argument("kappa must be >= 1");
    return min_ball_mass(lm, lambda) / (2.0 * kappa * lm.vol0);
}

double min_node_ball_mass(const MeshGraph& g, const EdgeLengths& w0, const MetricField& f0,
                          const std::vector<std::size_t>& centers, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("ball radius must be positive");
    if (centers.empty()) throw std::invalid_argument("ball centers missing");
    const ParamChart& chart = g.chart();
    std::vector<double> node_mass(chart.grid_nodes());
    for (std::size_t id = 0; id < chart.grid_nodes(); ++id) {
        node_mass[id] = std::sqrt(f0.eval(chart.node_coord(id)).det()) * chart.dual_area(id);
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c : centers) {
        const std::vector<double> row = dijkstra(g, w0, c);
        double mass = 0.0;
        for (std::size_t id = 0; id < chart.grid_nodes(); ++id) {
            if (row[id] <= radius) mass += node_mass[id];
        }
        best = std::min(best, mass);
    }
    return best;
}

GoodSetCheck verify_good_set(const LandmarkSet& lm, const Selection& sel, const PairSample& ps,
                             double lambda, double tau, double diam) {
    GoodSetCheck chk;
    chk.allowance = 2.0 * tau * diam;
    const double budget = 2.0 * (lambda + sel.delta);
    chk.worst_excess = -std::numeric_limits<double>::infinity();
    const std::size_t L = lm.count();

    // Retained-partner indicator per landmark (self always retained).
    std::vector<std::vector<char>> partner(L, std::vector<char>(L, 0));
    for (std::size_t a = 0; a < L; ++a) partner[a][a] = 1;
    for (std::size_t k = 0; k < ps.pairs.size(); ++k) {
        if (!sel.retained[k]) continue;
        const auto a = static_cast<std::size_t>(ps.pairs[k].a);
        const auto b = static_cast<std::size_t>(ps.pairs[k].b);
        partner[a][b] = 1;
        partner[b][a] = 1;
    }

    chk.intersection_bound = (1.0 - 2.0 * sel.kappa * sel.eps) * lm.vol0;
    chk.min_intersection = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < L; ++a) {
        if (!sel.in_w[a]) continue;
        for (std::size_t b = a + 1; b < L; ++b) {
            if (!sel.in_w[b]) continue;
            const double gap = std::fabs(lm.dj[a][b] - lm.d0[a][b]);
            chk.worst_excess = std::max(chk.worst_excess, gap - budget);
            double common = 0.0;
            for (std::size_t q = 0; q < L; ++q) {
                if (partner[a][q] && partner[b][q]) common += lm.mu0[q];
            }
            chk.min_intersection = std::min(chk.min_intersection, common);
            ++chk.pairs_checked;
        }
    }
    if (chk.pairs_checked == 0) {
        chk.worst_excess = 0.0;
        chk.min_intersection = 0.0;
        chk.ok = true;
        return chk;
    }
    chk.ok = chk.worst_excess <= chk.allowance &&
             chk.min_intersection > chk.intersection_bound - 1e-9 * lm.vol0;
    return chk;
}

}  // namespace flatlab
