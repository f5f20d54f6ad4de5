#include "flatlab/zspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace flatlab {

std::size_t ZGraph::mj_id(std::size_t node) const {
    if (mask_[node]) return top_id(node);
    return static_cast<std::size_t>(levels_) * n_base_ + copy_rank_[node];
}

ZGraph ZGraph::build(const MeshGraph& g, const EdgeLengths& w0, const EdgeLengths& wj,
                     const ZSpec& spec) {
    const std::size_t n = g.n_nodes();
    if (spec.mask.size() != n) throw std::invalid_argument("mask does not match graph");
    if (!(spec.height > 0.0)) throw std::invalid_argument("slab height must be positive");
    if (spec.levels < 2) throw std::invalid_argument("slab needs at least floor and top");
    if (w0.len.size() != g.edges().size() || wj.len.size() != g.edges().size())
        throw std::invalid_argument("edge lengths do not match graph");

    ZGraph z;
    z.n_base_ = n;
    z.levels_ = spec.levels;
    z.height_ = spec.height;
    z.mask_ = std::vector<char>(spec.mask.begin(), spec.mask.end());
    z.copy_rank_.assign(n, static_cast<std::size_t>(-1));
    std::size_t ncopy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!z.mask_[i]) z.copy_rank_[i] = ncopy++;
    }
    z.mask_empty_ = (ncopy == n);
    const std::size_t L = static_cast<std::size_t>(spec.levels);
    z.n_total_ = L * n + ncopy;
    const double dz = spec.height / (spec.levels - 1);

    // Undirected arcs, stored once per direction.
    struct Raw {
        std::size_t a, b;
        double len;
    };
    std::vector<Raw> raw;
    const std::size_t ne = g.edges().size();
    raw.reserve(2 * ne * L + n * (L - 1) + 2 * ne * (L - 1));

    for (std::size_t e = 0; e < ne; ++e) {
        const auto a = static_cast<std::size_t>(g.edges()[e].a);
        const auto b = static_cast<std::size_t>(g.edges()[e].b);
        // Floor horizontals carry the base metric; a dominating-metric copy of
        // the same edge could never lie on a shortest path, so it is omitted.
        raw.push_back({a, b, w0.len[e]});
        for (std::size_t l = 1; l < L; ++l) {
            raw.push_back({l * n + a, l * n + b, wj.len[e]});
        }
        const double diag = std::sqrt(wj.len[e] * wj.len[e] + dz * dz);
        for (std::size_t l = 0; l + 1 < L; ++l) {
            raw.push_back({l * n + a, (l + 1) * n + b, diag});
            raw.push_back({l * n + b, (l + 1) * n + a, diag});
        }
        // Detached dominating-metric copy outside the mask.
        const std::size_t top = (L - 1) * n;
        if (!z.mask_[a] && !z.mask_[b]) {
            raw.push_back({L * n + z.copy_rank_[a], L * n + z.copy_rank_[b], wj.len[e]});
        } else if (!z.mask_[a]) {
            raw.push_back({L * n + z.copy_rank_[a], top + b, wj.len[e]});
        } else if (!z.mask_[b]) {
            raw.push_back({L * n + z.copy_rank_[b], top + a, wj.len[e]});
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l + 1 < L; ++l) {
            raw.push_back({l * n + i, (l + 1) * n + i, dz});
        }
    }

    // Detached copies must reach the slab only through masked top nodes.
    for (const Raw& r : raw) {
        const bool ca = r.a >= L * n, cb = r.b >= L * n;
        if (ca == cb) continue;
        const std::size_t slab = ca ? r.b : r.a;
        if (slab < (L - 1) * n || !z.mask_[slab - (L - 1) * n])
            throw InvariantError("detached copy wired past the masked top layer");
    }

    z.off_.assign(z.n_total_ + 1, 0);
    for (const Raw& r : raw) {
        ++z.off_[r.a + 1];
        ++z.off_[r.b + 1];
    }
    for (std::size_t i = 0; i < z.n_total_; ++i) z.off_[i + 1] += z.off_[i];
    z.arcs_.resize(static_cast<std::size_t>(z.off_[z.n_total_]));
    std::vector<std::int64_t> cursor(z.off_.begin(), z.off_.end() - 1);
    for (const Raw& r : raw) {
        z.arcs_[static_cast<std::size_t>(cursor[r.a]++)] = {static_cast<std::int64_t>(r.b), r.len};
        z.arcs_[static_cast<std::size_t>(cursor[r.b]++)] = {static_cast<std::int64_t>(r.a), r.len};
    }
    return z;
}

std::vector<double> ZGraph::distances(std::size_t source) const {
    if (source >= n_total_) throw std::invalid_argument("z-space source out of range");
    std::vector<double> dist(n_total_, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[source] = 0.0;
    pq.emplace(0.0, source);
    while (!pq.empty()) {
        const auto [d, x] = pq.top();
        pq.pop();
        if (d > dist[x]) continue;
        for (std::int64_t s = off_[x]; s < off_[x + 1]; ++s) {
            const Arc& a = arcs_[static_cast<std::size_t>(s)];
            const double nd = d + a.len;
            const auto nb = static_cast<std::size_t>(a.to);
            if (nd < dist[nb]) {
                dist[nb] = nd;
                pq.emplace(nd, nb);
            }
        }
    }
    return dist;
}

ZCertificate verify_zspace(const MeshGraph& g, const EdgeLengths& w0, const EdgeLengths& wj,
                           const ZSpec& spec, const std::vector<std::size_t>& samples,
                           double shortfall_allowance, double height_required) {
    const ZGraph z = ZGraph::build(g, w0, wj, spec);
    ZCertificate cert;
    cert.shortfall_allowance = shortfall_allowance;
    cert.height_required = height_required;
    cert.hypothesis_ok = spec.height >= height_required - 1e-12;
    cert.mask_empty = z.mask_empty();
    constexpr double kTiny = 1e-9;

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::size_t p = samples[i];
        const std::vector<double> base0 = dijkstra(g, w0, p);
        const std::vector<double> basej = dijkstra(g, wj, p);
        const std::vector<double> zf = z.distances(z.floor_id(p));
        const std::vector<double> zc = z.distances(z.mj_id(p));
        cert.max_column_excess = std::max(cert.max_column_excess,
                                          std::fabs(zf[z.top_id(p)] - spec.height));
        for (std::size_t k = i + 1; k < samples.size(); ++k) {
            const std::size_t q = samples[k];
            cert.max_floor_error = std::max(
                cert.max_floor_error, std::fabs(zf[z.floor_id(q)] - base0[q]));
            const double dzq = zc[z.mj_id(q)];
            cert.max_ceiling_overrun = std::max(cert.max_ceiling_overrun, dzq - basej[q]);
            cert.max_shortfall = std::max(cert.max_shortfall, basej[q] - dzq);
            ++cert.pairs_checked;
        }
    }
    // an empty mask builds a valid graph but glues nothing, so it cannot certify
    cert.ok = !cert.mask_empty && cert.hypothesis_ok && cert.max_floor_error <= kTiny &&
              cert.max_ceiling_overrun <= kTiny &&
              cert.max_shortfall <= shortfall_allowance + kTiny &&
              cert.max_column_excess <= kTiny;
    return cert;
}

}  // namespace flatlab
