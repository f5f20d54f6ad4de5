#include "flatlab/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace flatlab {

std::vector<std::pair<int, int>> stencil_directions(int k) {
    if (k < 1 || k > 3) throw std::invalid_argument("stencil order must be 1, 2 or 3");
    std::vector<std::pair<int, int>> dirs;
    for (int p = 0; p <= k; ++p) {
        for (int q = -k; q <= k; ++q) {
            if (p == 0 && q <= 0) continue;  // canonical half: p>0, or p==0 && q>0
            if (std::gcd(p, std::abs(q)) != 1) continue;
            dirs.emplace_back(p, q);
        }
    }
    return dirs;
}

MeshGraph MeshGraph::build(std::shared_ptr<const ParamChart> chart, int stencil) {
    const auto dirs = stencil_directions(stencil);
    const Axis& au = chart->axis_u();
    const Axis& av = chart->axis_v();
    const long long nu = static_cast<long long>(au.ncells());
    const long long nv = static_cast<long long>(av.ncells());
    // A periodic axis shorter than 2k+1 cells would let one direction produce
    // the same undirected edge twice (or a self-loop) through wrap-around.
    if (au.periodic && nu < 2 * stencil + 1)
        throw std::invalid_argument("periodic u-axis too coarse for stencil");
    if (av.periodic && nv < 2 * stencil + 1)
        throw std::invalid_argument("periodic v-axis too coarse for stencil");

    MeshGraph g;
    g.chart_ = chart;
    g.stencil_ = stencil;
    g.edges_.reserve(static_cast<std::size_t>(nu * nv) * dirs.size());

    auto wrap = [](long long i, long long n) { return static_cast<std::size_t>(((i % n) + n) % n); };

    for (long long iu = 0; iu < nu; ++iu) {
        for (long long iv = 0; iv < nv; ++iv) {
            const std::size_t a = chart->node_index(static_cast<std::size_t>(iu),
                                                    static_cast<std::size_t>(iv));
            const Vec2 pa{au.centers[static_cast<std::size_t>(iu)],
                          av.centers[static_cast<std::size_t>(iv)]};
            for (auto [p, q] : dirs) {
                const long long ju = iu + p;
                const long long jv = iv + q;
                std::size_t bu;
                if (au.periodic) {
                    bu = wrap(ju, nu);
                } else {
                    if (ju < 0 || ju >= nu) continue;
                    bu = static_cast<std::size_t>(ju);
                }
                const std::size_t bv = wrap(jv, nv);
                const std::size_t b = chart->node_index(bu, bv);
                Edge e;
                e.a = static_cast<std::int32_t>(a);
                e.b = static_cast<std::int32_t>(b);
                e.anchor = pa;
                e.disp = {au.unwrapped_center(ju) - pa.u, av.unwrapped_center(jv) - pa.v};
                g.edges_.push_back(e);
            }
        }
    }

    if (chart->has_poles()) {
        // Poles attach to the full adjacent ring; the segment runs radially at
        // the ring node's azimuth.
        const std::size_t np = chart->north_pole();
        const std::size_t sp = chart->south_pole();
        const double r_first = au.centers.front();
        const double r_last = au.centers.back();
        for (long long iv = 0; iv < nv; ++iv) {
            const double theta = av.centers[static_cast<std::size_t>(iv)];
            Edge en;
            en.a = static_cast<std::int32_t>(np);
            en.b = static_cast<std::int32_t>(chart->node_index(0, static_cast<std::size_t>(iv)));
            en.anchor = {0.0, theta};
            en.disp = {r_first, 0.0};
            g.edges_.push_back(en);
            Edge es;
            es.a = static_cast<std::int32_t>(sp);
            es.b = static_cast<std::int32_t>(
                chart->node_index(static_cast<std::size_t>(nu - 1), static_cast<std::size_t>(iv)));
            es.anchor = {kPi, theta};
            es.disp = {r_last - kPi, 0.0};
            g.edges_.push_back(es);
        }
    }

    const std::size_t n = chart->n_nodes();
    std::vector<std::int64_t> deg(n + 1, 0);
    for (const Edge& e : g.edges_) {
        ++deg[static_cast<std::size_t>(e.a) + 1];
        ++deg[static_cast<std::size_t>(e.b) + 1];
    }
    for (std::size_t i = 0; i < n; ++i) deg[i + 1] += deg[i];
    g.adj_off_ = deg;
    g.adj_.resize(static_cast<std::size_t>(g.adj_off_.back()));
    std::vector<std::int64_t> cursor(g.adj_off_.begin(), g.adj_off_.end() - 1);
    for (std::size_t eid = 0; eid < g.edges_.size(); ++eid) {
        const Edge& e = g.edges_[eid];
        g.adj_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.a)]++)] = {
            e.b, static_cast<std::int32_t>(eid)};
        g.adj_[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.b)]++)] = {
            e.a, static_cast<std::int32_t>(eid)};
    }

    // The chart is a closed surface; a disconnected graph is a construction bug.
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack = {0};
    seen[0] = 1;
    std::size_t visited = 1;
    while (!stack.empty()) {
        const std::size_t x = stack.back();
        stack.pop_back();
        for (std::int64_t s = g.adj_off_[x]; s < g.adj_off_[x + 1]; ++s) {
            const auto nb = static_cast<std::size_t>(g.adj_[static_cast<std::size_t>(s)].nbr);
            if (!seen[nb]) {
                seen[nb] = 1;
                ++visited;
                stack.push_back(nb);
            }
        }
    }
    if (visited != n) throw InvariantError("mesh graph is disconnected");
    return g;
}

std::uint64_t MeshGraph::content_hash() const {
    std::string s = chart_->descriptor();
    s += "|stencil=";
    s += std::to_string(stencil_);
    return fnv1a64(s);
}

}  // namespace flatlab
