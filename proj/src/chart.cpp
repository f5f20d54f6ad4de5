#include "flatlab/chart.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "json.hpp"

namespace flatlab {

namespace {

constexpr std::size_t kMaxCells = 8u * 1024u * 1024u;

// Positive-measure overlap of [a0,a1] with [b0,b1]; on a periodic axis the
// band interval is tested in all three adjacent period images.
bool overlaps(double a0, double a1, double b0, double b1, bool periodic, double period) {
    const int shifts = periodic ? 1 : 0;
    for (int s = -shifts; s <= shifts; ++s) {
        const double lo = b0 + s * period;
        const double hi = b1 + s * period;
        if (std::max(a0, lo) < std::min(a1, hi)) return true;
    }
    return false;
}

std::vector<double> refine_axis_bounds(double lo, double hi, bool periodic, int ncells,
                                       const std::vector<RefineBand>& bands) {
    const double period = hi - lo;
    // Reject bands that overlap each other; graded tails may overlap, the
    // stated intervals may not (max-combination would silently reorder them).
    for (std::size_t i = 0; i < bands.size(); ++i) {
        for (std::size_t j = i + 1; j < bands.size(); ++j) {
            if (overlaps(bands[i].center - bands[i].half_width, bands[i].center + bands[i].half_width,
                         bands[j].center - bands[j].half_width, bands[j].center + bands[j].half_width,
                         periodic, period)) {
                throw std::invalid_argument("refinement bands overlap on one axis");
            }
        }
    }

    std::vector<double> base(ncells + 1);
    for (int k = 0; k <= ncells; ++k) base[k] = lo + period * static_cast<double>(k) / ncells;
    base.front() = lo;
    base.back() = hi;

    std::vector<int> factor(ncells, 1);
    for (const RefineBand& b : bands) {
        if (b.factor < 2) throw std::invalid_argument("refinement factor must be >= 2");
        if (b.half_width <= 0.0) throw std::invalid_argument("refinement half_width must be > 0");
        // Seed: cells meeting the band interval.
        std::vector<int> dist(ncells, -1);
        std::deque<int> queue;
        for (int c = 0; c < ncells; ++c) {
            if (overlaps(base[c], base[c + 1], b.center - b.half_width, b.center + b.half_width,
                         periodic, period)) {
                dist[c] = 0;
                queue.push_back(c);
            }
        }
        if (queue.empty()) throw std::invalid_argument("refinement band misses the axis domain");
        // Grade outward: factor halves (rounded up) per cell of distance, so
        // adjacent cell widths differ by at most 2x.
        while (!queue.empty()) {
            const int c = queue.front();
            queue.pop_front();
            const int m = static_cast<int>(
                std::ceil(static_cast<double>(b.factor) / std::pow(2.0, dist[c])));
            if (m <= 1) continue;
            factor[c] = std::max(factor[c], m);
            for (int step : {-1, 1}) {
                int n = c + step;
                if (periodic) {
                    n = (n % ncells + ncells) % ncells;
                } else if (n < 0 || n >= ncells) {
                    continue;
                }
                if (dist[n] < 0) {
                    dist[n] = dist[c] + 1;
                    queue.push_back(n);
                }
            }
        }
    }

    std::vector<double> out;
    out.reserve(base.size());
    out.push_back(base.front());
    for (int c = 0; c < ncells; ++c) {
        const double w = (base[c + 1] - base[c]) / factor[c];
        for (int s = 1; s < factor[c]; ++s) out.push_back(base[c] + s * w);
        out.push_back(base[c + 1]);
    }
    return out;
}

Axis build_axis(double lo, double hi, bool periodic, int ncells,
                const std::vector<RefineBand>& bands) {
    if (ncells < 2) throw std::invalid_argument("axis needs at least 2 cells");
    Axis ax;
    ax.lo = lo;
    ax.hi = hi;
    ax.periodic = periodic;
    ax.bounds = refine_axis_bounds(lo, hi, periodic, ncells, bands);
    const std::size_t n = ax.bounds.size() - 1;
    ax.centers.resize(n);
    ax.widths.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        ax.centers[c] = 0.5 * (ax.bounds[c] + ax.bounds[c + 1]);
        ax.widths[c] = ax.bounds[c + 1] - ax.bounds[c];
    }
    return ax;
}

}  // namespace

double Axis::unwrapped_center(long long raw) const {
    const long long n = static_cast<long long>(ncells());
    if (!periodic) {
        if (raw < 0 || raw >= n) throw std::invalid_argument("axis index out of range");
        return centers[static_cast<std::size_t>(raw)];
    }
    long long q = raw / n;
    long long r = raw % n;
    if (r < 0) {
        r += n;
        q -= 1;
    }
    return centers[static_cast<std::size_t>(r)] + period() * static_cast<double>(q);
}

std::shared_ptr<const ParamChart> ParamChart::make(ChartKind kind, int nu, int nv,
                                                   const std::vector<RefineBand>& bands) {
    auto chart = std::make_shared<ParamChart>();
    chart->kind_ = kind;
    chart->base_nu_ = nu;
    chart->base_nv_ = nv;
    chart->bands_ = bands;

    std::vector<RefineBand> ub, vb;
    for (const RefineBand& b : bands) {
        if (b.axis == 0)
            ub.push_back(b);
        else if (b.axis == 1)
            vb.push_back(b);
        else
            throw std::invalid_argument("refinement band axis must be 0 or 1");
    }

    if (kind == ChartKind::Sphere) {
        chart->u_ = build_axis(0.0, kPi, false, nu, ub);
    } else {
        chart->u_ = build_axis(-kPi, kPi, true, nu, ub);
    }
    chart->v_ = build_axis(-kPi, kPi, true, nv, vb);

    if (chart->u_.ncells() * chart->v_.ncells() > kMaxCells) {
        throw std::invalid_argument("refined chart exceeds cell budget");
    }
    return chart;
}

Vec2 ParamChart::node_coord(std::size_t id) const {
    if (id < grid_nodes()) {
        const std::size_t nv = v_.ncells();
        return {u_.centers[id / nv], v_.centers[id % nv]};
    }
    if (kind_ == ChartKind::Sphere && id == north_pole()) return {0.0, 0.0};
    if (kind_ == ChartKind::Sphere && id == south_pole()) return {kPi, 0.0};
    throw std::invalid_argument("node id out of range");
}

double ParamChart::dual_area(std::size_t id) const {
    if (id < grid_nodes()) {
        const std::size_t nv = v_.ncells();
        return u_.widths[id / nv] * v_.widths[id % nv];
    }
    if (kind_ == ChartKind::Sphere && id < n_nodes()) return 0.0;
    throw std::invalid_argument("node id out of range");
}

std::string ParamChart::descriptor() const {
    nlohmann::json j;
    j["kind"] = kind_ == ChartKind::Sphere ? "sphere" : "torus";
    j["nu"] = base_nu_;
    j["nv"] = base_nv_;
    nlohmann::json arr = nlohmann::json::array();
    for (const RefineBand& b : bands_) {
        arr.push_back({{"axis", b.axis},
                       {"center", b.center},
                       {"factor", b.factor},
                       {"half_width", b.half_width}});
    }
    j["bands"] = arr;
    return j.dump();
}

}  // namespace flatlab
