#include "flatlab/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <string>
#include <tuple>

namespace flatlab {

double segment_length(const MetricField& field, Vec2 anchor, Vec2 disp, int quad_order) {
    double acc = 0.0;
    for (const GaussPoint& gp : gauss_rule(quad_order)) {
        const double q = field.eval(anchor + gp.t * disp).quad(disp);
        acc += gp.w * std::sqrt(std::max(q, 0.0));
    }
    return acc;
}

EdgeLengths edge_lengths(const MeshGraph& g, const MetricField& field, int quad_order) {
    EdgeLengths out;
    out.field_hash = field.content_hash();
    out.quad_order = quad_order;
    out.len.resize(g.edges().size());
    for (std::size_t e = 0; e < g.edges().size(); ++e) {
        const Edge& ed = g.edges()[e];
        const double l = segment_length(field, ed.anchor, ed.disp, quad_order);
        if (!(l > 0.0)) {
            throw InvariantError("edge of non-positive metric length at (" +
                                 std::to_string(ed.anchor.u) + ", " + std::to_string(ed.anchor.v) +
                                 ")");
        }
        out.len[e] = l;
    }
    return out;
}

double max_edge_ratio(const EdgeLengths& num, const EdgeLengths& den) {
    if (num.len.size() != den.len.size())
        throw std::invalid_argument("edge length tables of different graphs");
    double worst = 0.0;
    for (std::size_t e = 0; e < num.len.size(); ++e) worst = std::max(worst, num.len[e] / den.len[e]);
    return worst;
}

std::vector<double> dijkstra(const MeshGraph& g, const EdgeLengths& w, std::size_t source) {
    if (w.len.size() != g.edges().size())
        throw std::invalid_argument("edge lengths do not match graph");
    const std::size_t n = g.n_nodes();
    if (source >= n) throw std::invalid_argument("dijkstra source out of range");
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[source] = 0.0;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
        const auto [d, x] = pq.top();
        pq.pop();
        if (d > dist[x]) continue;
        for (std::int64_t s = g.adj_off()[x]; s < g.adj_off()[x + 1]; ++s) {
            const auto& inc = g.adj()[static_cast<std::size_t>(s)];
            const double nd = d + w.len[static_cast<std::size_t>(inc.eid)];
            const auto nb = static_cast<std::size_t>(inc.nbr);
            if (nd < dist[nb]) {
                dist[nb] = nd;
                pq.emplace(nd, nb);
            }
        }
    }
    return dist;
}

double graph_distance(const MeshGraph& g, const EdgeLengths& w, std::size_t a, std::size_t b) {
    return dijkstra(g, w, a)[b];
}

std::vector<std::size_t> farthest_point_sample(const MeshGraph& g, const EdgeLengths& w,
                                               int count, unsigned seed) {
    const std::size_t n = g.n_nodes();
    if (count < 1 || static_cast<std::size_t>(count) > n)
        throw std::invalid_argument("landmark count out of range");
    std::vector<std::size_t> picks;
    picks.reserve(static_cast<std::size_t>(count));
    picks.push_back(seed % n);
    std::vector<double> best = dijkstra(g, w, picks[0]);
    while (picks.size() < static_cast<std::size_t>(count)) {
        std::size_t arg = 0;
        double far = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (best[i] > far) {
                far = best[i];
                arg = i;
            }
        }
        picks.push_back(arg);
        const std::vector<double> d = dijkstra(g, w, arg);
        for (std::size_t i = 0; i < n; ++i) best[i] = std::min(best[i], d[i]);
    }
    return picks;
}

double diameter_estimate(const MeshGraph& g, const EdgeLengths& w, int landmarks,
                         unsigned seed) {
    if (landmarks < 2)
        throw std::invalid_argument("diameter_estimate: a single landmark measures a radius");
    const std::vector<std::size_t> lm = farthest_point_sample(g, w, landmarks, seed);
    double best = 0.0;
    for (const std::size_t s : lm) {
        const std::vector<double> d = dijkstra(g, w, s);
        for (const double di : d) best = std::max(best, di);
    }
    return best;
}

VoronoiAssign voronoi_partition(const MeshGraph& g, const EdgeLengths& w,
                                const std::vector<std::size_t>& seeds) {
    if (seeds.empty()) throw std::invalid_argument("voronoi_partition needs seeds");
    const std::size_t n = g.n_nodes();
    VoronoiAssign va;
    va.owner.assign(n, -1);
    va.dist.assign(n, std::numeric_limits<double>::infinity());
    // Lexicographic (distance, owner) relaxation makes the tie rule exact.
    using Item = std::tuple<double, std::int32_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const std::size_t node = seeds[s];
        if (node >= n) throw std::invalid_argument("voronoi seed out of range");
        const auto idx = static_cast<std::int32_t>(s);
        if (0.0 < va.dist[node] || idx < va.owner[node]) {
            va.dist[node] = 0.0;
            va.owner[node] = idx;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (va.owner[i] >= 0) pq.emplace(0.0, va.owner[i], i);
    }
    while (!pq.empty()) {
        const auto [d, own, x] = pq.top();
        pq.pop();
        if (d > va.dist[x] || (d == va.dist[x] && own > va.owner[x])) continue;
        for (std::int64_t s = g.adj_off()[x]; s < g.adj_off()[x + 1]; ++s) {
            const auto& inc = g.adj()[static_cast<std::size_t>(s)];
            const double nd = d + w.len[static_cast<std::size_t>(inc.eid)];
            const auto nb = static_cast<std::size_t>(inc.nbr);
            if (nd < va.dist[nb] || (nd == va.dist[nb] && own < va.owner[nb])) {
                va.dist[nb] = nd;
                va.owner[nb] = own;
                pq.emplace(nd, own, nb);
            }
        }
    }
    return va;
}

double total_volume(const ParamChart& chart, const MetricField& field) {
    double acc = 0.0;
    for (std::size_t id = 0; id < chart.grid_nodes(); ++id) {
        const double dt = field.eval(chart.node_coord(id)).det();
        acc += std::sqrt(std::max(dt, 0.0)) * chart.dual_area(id);
    }
    return acc;
}

double total_volume(const ParamChart& chart, const MetricField& field,
                    const std::vector<std::uint8_t>& mask) {
    if (mask.size() != chart.n_nodes())
        throw std::invalid_argument("volume mask does not match chart");
    double acc = 0.0;
    for (std::size_t id = 0; id < chart.grid_nodes(); ++id) {
        if (!mask[id]) continue;
        const double dt = field.eval(chart.node_coord(id)).det();
        acc += std::sqrt(std::max(dt, 0.0)) * chart.dual_area(id);
    }
    return acc;
}

double curve_length(const MetricField& field, const std::vector<Vec2>& polyline,
                    int quad_order) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        acc += segment_length(field, polyline[i], polyline[i + 1] - polyline[i], quad_order);
    }
    return acc;
}

namespace {

std::size_t nearest_center(const std::vector<double>& centers, double x, bool periodic,
                           double period, double* err) {
    auto it = std::lower_bound(centers.begin(), centers.end(), x);
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    auto consider = [&](std::size_t i) {
        double d = std::fabs(centers[i] - x);
        if (periodic) d = std::min(d, period - d);
        if (d < bd) {
            bd = d;
            best = i;
        }
    };
    if (it != centers.end()) consider(static_cast<std::size_t>(it - centers.begin()));
    if (it != centers.begin()) consider(static_cast<std::size_t>(it - centers.begin()) - 1);
    if (periodic) {
        consider(0);
        consider(centers.size() - 1);
    }
    *err = bd;
    return best;
}

}  // namespace

std::size_t nearest_node(const ParamChart& chart, Vec2 p) {
    const Axis& au = chart.axis_u();
    const Axis& av = chart.axis_v();
    double du = 0.0, dv = 0.0;
    const double x = au.periodic ? wrap_pi(p.u) : std::clamp(p.u, au.lo, au.hi);
    const std::size_t iu = nearest_center(au.centers, x, au.periodic, au.period(), &du);
    const std::size_t iv = nearest_center(av.centers, wrap_pi(p.v), av.periodic, av.period(), &dv);
    std::size_t best = chart.node_index(iu, iv);
    double score = du * du + dv * dv;
    if (chart.has_poles()) {
        // A pole is every azimuth at once: compete on polar angle alone.
        if (p.u * p.u < score) {
            best = chart.north_pole();
            score = p.u * p.u;
        }
        const double s = (kPi - p.u) * (kPi - p.u);
        if (s < score) best = chart.south_pole();
    }
    return best;
}

double mesh_tolerance(int resolution, int stencil, int quad_order) {
    static std::map<std::tuple<int, int, int>, double> memo;
    static std::mutex mu;
    const auto key = std::make_tuple(resolution, stencil, quad_order);
    {
        std::lock_guard<std::mutex> lock(mu);
        const auto it = memo.find(key);
        if (it != memo.end()) return it->second;
    }
    const auto chart = ParamChart::make(ChartKind::Sphere, resolution, 2 * resolution);
    const MeshGraph g = MeshGraph::build(chart, stencil);
    const FieldPtr sphere = make_round_sphere(1.0);
    const EdgeLengths w = edge_lengths(g, *sphere, quad_order);
    const std::vector<std::size_t> lm = farthest_point_sample(g, w, 12, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < lm.size(); ++i) {
        const std::vector<double> d = dijkstra(g, w, lm[i]);
        const Vec2 a = chart->node_coord(lm[i]);
        for (std::size_t j = i + 1; j < lm.size(); ++j) {
            const Vec2 b = chart->node_coord(lm[j]);
            const double c = std::cos(a.u) * std::cos(b.u) +
                             std::sin(a.u) * std::sin(b.u) * std::cos(a.v - b.v);
            const double truth = std::acos(std::clamp(c, -1.0, 1.0));
            if (truth < 0.2) continue;  // short pairs carry no stencil information
            worst = std::max(worst, std::fabs(d[lm[j]] - truth) / truth);
        }
    }
    std::lock_guard<std::mutex> lock(mu);
    memo[key] = worst;
    return worst;
}

}  // namespace flatlab
