#include "flatlab/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "flatlab/cache.hpp"
#include "flatlab/tubes.hpp"
#include "json.hpp"

namespace flatlab {

namespace {

using nlohmann::json;

// Smallest power of two f >= 2 with spacing / f <= target; capped.
int refine_factor(double spacing, double target, int cap) {
    if (!(target > 0.0)) throw std::invalid_argument("refinement target must be positive");
    int f = 2;
    while (spacing / f > target && f < cap) f *= 2;
    return f;
}

// Union of [c - w, c + w] intervals as disjoint refinement bands.
std::vector<RefineBand> merged_bands(int axis, std::vector<std::pair<double, double>> iv,
                                     int factor) {
    std::sort(iv.begin(), iv.end());
    std::vector<RefineBand> out;
    for (const auto& [lo, hi] : iv) {
        if (!out.empty() && lo <= out.back().center + out.back().half_width + 1e-12) {
            const double old_lo = out.back().center - out.back().half_width;
            const double new_hi = std::max(out.back().center + out.back().half_width, hi);
            out.back().center = 0.5 * (old_lo + new_hi);
            out.back().half_width = 0.5 * (new_hi - old_lo);
        } else {
            out.push_back({axis, 0.5 * (lo + hi), 0.5 * (hi - lo), factor});
        }
    }
    return out;
}

FamilyInstance make_ilmanen(const RunConfig& cfg, int j) {
    FamilyInstance fam;
    fam.name = "ilmanen";
    fam.j = j;
    const double rho = cfg.family.rho > 0.0 ? cfg.family.rho : 1.0 / (j * j);
    const double depth = cfg.family.well_depth;
    const std::vector<Vec2> centers = default_well_centers(j);

    const int res = cfg.mesh.resolution;
    const double spacing = kPi / res;
    std::vector<RefineBand> bands;
    if (spacing > 0.5 * rho) {
        std::vector<std::pair<double, double>> iv;
        for (const Vec2& c : centers) {
            iv.emplace_back(std::max(0.0, c.u - 1.5 * rho), std::min(kPi, c.u + 1.5 * rho));
        }
        bands = merged_bands(0, std::move(iv), refine_factor(spacing, 0.5 * rho, 32));
    }
    fam.chart = ParamChart::make(ChartKind::Sphere, res, 2 * res, bands);
    fam.lower = make_round_sphere(1.0);
    fam.upper = make_well_sphere(centers, rho, depth);
    fam.crossing_excess = 2.0 * depth;
    return fam;
}

FamilyInstance make_finsler(const RunConfig& cfg, int j) {
    FamilyInstance fam;
    fam.name = "finsler-torus";
    fam.j = j;
    const int res = cfg.mesh.resolution;
    std::vector<RefineBand> bands;
    const double want = std::ldexp(1.0, 3 * j - 4);  // resolve the ramp width 4^-j
    if (want >= 2.0) {
        const int factor = static_cast<int>(std::min(want, 256.0));
        bands.push_back({0, 0.0, std::pow(4.0, -j), factor});
    }
    fam.chart = ParamChart::make(ChartKind::Torus, res, 3 * res, bands);
    fam.lower = make_warped_torus(profile_dyadic_spikes(j, 0.2, 5.0));
    fam.upper = make_warped_torus(profile_constant(5.0));
    fam.base_is_upper = true;  // the flat-metric base dominates its spiked members
    return fam;
}

FamilyInstance make_cinched(const RunConfig& cfg, int j) {
    FamilyInstance fam;
    fam.name = "cinched-sphere";
    fam.j = j;
    const int res = cfg.mesh.resolution;
    const double spacing = kPi / res;
    const double hw = 1.0 / j;
    std::vector<RefineBand> bands;
    if (spacing > hw / 6.0) {
        bands.push_back({0, kPi / 2.0, hw, refine_factor(spacing, hw / 6.0, 64)});
    }
    fam.chart = ParamChart::make(ChartKind::Sphere, res, 2 * res, bands);
    fam.lower = make_conformal(make_round_sphere(1.0), profile_cinch(j, cfg.family.h0));
    fam.upper = make_round_sphere(1.0);
    fam.base_is_upper = true;
    return fam;
}

FamilyInstance make_bump(const RunConfig& cfg, int j) {
    FamilyInstance fam;
    fam.name = "bump-sphere";
    fam.j = j;
    double amp = 0.5, width = 0.8;
    if (!cfg.family.profile.empty()) {
        std::istringstream ss(cfg.family.profile);
        char comma = 0;
        if (!(ss >> amp >> comma >> width) || comma != ',')
            throw ConfigError("bump-sphere profile must be 'amp,width'");
    }
    if (!(amp > 0.0) || !(width > 0.0) || width > 1.2)
        throw ConfigError("bump-sphere needs amp > 0 and width in (0, 1.2]");
    fam.chart = ParamChart::make(ChartKind::Sphere, cfg.mesh.resolution, 2 * cfg.mesh.resolution);
    fam.lower = make_round_sphere(1.0);
    fam.upper = make_conformal(make_round_sphere(1.0), profile_bump(amp / j, width, 1.2));
    return fam;
}

FamilyInstance make_identical(const RunConfig& cfg, int j) {
    FamilyInstance fam;
    fam.name = "identical";
    fam.j = j;
    fam.chart = ParamChart::make(ChartKind::Sphere, cfg.mesh.resolution, 2 * cfg.mesh.resolution);
    fam.lower = make_round_sphere(1.0);
    fam.upper = fam.lower;
    return fam;
}

FamilyInstance make_grid(const RunConfig& cfg, int j) {
    if (cfg.family.profile.empty())
        throw ConfigError("grid family needs profile = path to a tensor CSV");
    FamilyInstance fam;
    fam.name = "grid";
    fam.j = j;
    fam.lower = load_grid_csv(cfg.family.profile);
    fam.upper = fam.lower;
    const bool sphere = fam.lower->descriptor().find("\"domain\":\"sphere\"") != std::string::npos;
    fam.chart = ParamChart::make(sphere ? ChartKind::Sphere : ChartKind::Torus,
                                 cfg.mesh.resolution,
                                 (sphere ? 2 : 1) * cfg.mesh.resolution);
    return fam;
}

json report_to_json(const BoundReport& r) {
    return json{{"formula", r.formula},
                {"family", r.family},
                {"j", r.j},
                {"lambda", r.lambda},
                {"kappa", r.kappa},
                {"eps", r.eps},
                {"delta", r.delta},
                {"closeness", r.closeness},
                {"height", r.height},
                {"diam", r.diam},
                {"tau", r.tau},
                {"vol0", r.vol0},
                {"volj", r.volj},
                {"volj_outside", r.volj_outside},
                {"vcap", r.vcap},
                {"value", r.value},
                {"feasible", r.feasible}};
}

json zcert_to_json(const ZCertificate& c) {
    return json{{"max_floor_error", c.max_floor_error},
                {"max_ceiling_overrun", c.max_ceiling_overrun},
                {"max_shortfall", c.max_shortfall},
                {"max_column_excess", c.max_column_excess},
                {"shortfall_allowance", c.shortfall_allowance},
                {"height_required", c.height_required},
                {"hypothesis_ok", c.hypothesis_ok},
                {"mask_empty", c.mask_empty},
                {"pairs_checked", c.pairs_checked},
                {"ok", c.ok}};
}

}  // namespace

FamilyInstance make_family(const RunConfig& cfg, int j) {
    if (j < 1) throw ConfigError("family index j must be >= 1");
    const std::string& name = cfg.family.name;
    if (name == "ilmanen") return make_ilmanen(cfg, j);
    if (name == "finsler-torus") return make_finsler(cfg, j);
    if (name == "cinched-sphere") return make_cinched(cfg, j);
    if (name == "bump-sphere") return make_bump(cfg, j);
    if (name == "identical") return make_identical(cfg, j);
    if (name == "grid") return make_grid(cfg, j);
    throw ConfigError("unknown family '" + name + "'");
}

FieldPtr load_grid_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open tensor CSV " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("tensor CSV is empty");
    std::istringstream head(line);
    std::string kind;
    int nu = 0, nv = 0;
    char c1 = 0, c2 = 0;
    if (!std::getline(head, kind, ',') || !(head >> nu >> c1 >> nv) || c1 != ',')
        throw ConfigError("tensor CSV header must be kind,nu,nv");
    (void)c2;
    ChartKind ck;
    if (kind == "sphere") {
        ck = ChartKind::Sphere;
    } else if (kind == "torus") {
        ck = ChartKind::Torus;
    } else {
        throw ConfigError("tensor CSV kind must be sphere or torus");
    }
    std::vector<Mat2> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        Mat2 m;
        char a = 0, b = 0;
        if (!(row >> m.xx >> a >> m.xy >> b >> m.yy) || a != ',' || b != ',')
            throw ConfigError("tensor CSV row must be xx,xy,yy");
        values.push_back(m);
    }
    return make_grid_tensor(ck, nu, nv, std::move(values));
}

RunResult run_experiment(const RunConfig& cfg) {
    validate_config(cfg);
    const DistanceCache cache{cfg.output.cache_dir};
    RunResult result;
    result.cfg = cfg;

    struct Work {
        FamilyInstance fam;
        MeshGraph graph;
        EdgeLengths wl, wu;
        LandmarkSet lm;
        PairSample ps;
    };
    std::vector<Work> works;

    for (const int j : cfg.family.js) {
        Work wk;
        wk.fam = make_family(cfg, j);
        wk.graph = MeshGraph::build(wk.fam.chart, cfg.mesh.stencil);
        wk.wl = edge_lengths(wk.graph, *wk.fam.lower, cfg.mesh.quad);

        DominationReport dom =
            check_dominates(*wk.fam.upper, *wk.fam.lower, wk.graph, cfg.mesh.quad);
        if (!dom.ok) {
            // Slack fallback: a family member within 1/(2j) of domination is
            // admitted after scaling the upper metric back above the lower.
            const double slack = 0.5 / j;
            dom = check_dominates(*wk.fam.upper, *wk.fam.lower, wk.graph, cfg.mesh.quad, slack);
            if (!dom.ok) {
                throw InfeasibleError(
                    "family member j=" + std::to_string(j) +
                    " fails domination (min eig " + std::to_string(dom.min_eig) + ")");
            }
            wk.fam.rescale = 1.0 / (1.0 - slack);
            wk.fam.upper = make_scaled(wk.fam.upper, wk.fam.rescale);
        }
        wk.wu = edge_lengths(wk.graph, *wk.fam.upper, cfg.mesh.quad);

        JRow row;
        row.j = j;
        row.rescale = wk.fam.rescale;
        row.tau = mesh_tolerance(cfg.mesh.resolution, cfg.mesh.stencil, cfg.mesh.quad);
        row.diam = diameter_estimate(wk.graph, wk.wu, 8, cfg.pipeline.seed) * (1.0 + row.tau);
        row.vol0 = total_volume(*wk.fam.chart, *wk.fam.lower);
        row.volj = total_volume(*wk.fam.chart, *wk.fam.upper);
        row.lp1 = lp_excess(*wk.fam.upper, *wk.fam.lower, *wk.fam.chart, 1.0);

        wk.lm = build_landmarks(wk.graph, wk.wl, wk.wu, *wk.fam.lower, *wk.fam.upper,
                                cfg.pipeline.landmarks, cfg.pipeline.seed, cache,
                                cfg.output.threads);
        wk.ps = make_pairs(wk.lm);
        result.rows.push_back(row);
        works.push_back(std::move(wk));
    }

    result.vcap = 0.0;
    for (const JRow& row : result.rows) result.vcap = std::max(result.vcap, row.volj);

    for (std::size_t i = 0; i < works.size(); ++i) {
        JRow& row = result.rows[i];
        Work& wk = works[i];
        row.sweep = sweep_bounds(wk.lm, wk.ps, row.diam, result.vcap,
                                 cfg.pipeline.lambda_grid, cfg.pipeline.kappa_grid);
        if (row.sweep.empty()) {
            throw InfeasibleError("every (lambda,kappa) grid point is infeasible for j=" +
                                  std::to_string(row.j));
        }
        for (BoundReport& rep : row.sweep) {
            rep.family = wk.fam.name;
            rep.j = row.j;
            rep.tau = row.tau;
        }
        row.best = row.sweep.front();

        if (cfg.pipeline.zverify) {
            const Selection sel = select_good_set(wk.lm, wk.ps, row.best.eps, row.best.kappa);
            ZSpec zs;
            zs.mask.assign(wk.graph.n_nodes(), 0);
            for (std::size_t node = 0; node < zs.mask.size(); ++node) {
                zs.mask[node] = sel.in_w[static_cast<std::size_t>(wk.lm.owner[node])];
            }
            zs.height = row.best.height;
            zs.levels = cfg.pipeline.zlevels;
            std::vector<std::size_t> samples;
            for (std::size_t a = 0; a < wk.lm.count(); ++a) {
                if (sel.in_w[a]) samples.push_back(wk.lm.ids[a]);
            }
            const double q = max_edge_ratio(wk.wu, wk.wl);
            const double allowance =
                2.0 * zs.height * cfg.pipeline.zlevels / (cfg.pipeline.zlevels - 1) +
                row.tau * row.diam + 2.0 * q * wk.lm.cover_radius;
            row.zcert = verify_zspace(wk.graph, wk.wl, wk.wu, zs, samples, allowance,
                                      row.best.height);
            row.zcert_present = true;
        }
    }
    return result;
}

std::string render_report_json(const RunResult& r) {
    json root;
    root["schema_version"] = r.cfg.schema_version;
    root["config"] = json::parse(dump_config(r.cfg));
    root["vcap"] = r.vcap;
    json rows = json::array();
    for (const JRow& row : r.rows) {
        json jr{{"j", row.j},           {"tau", row.tau},
                {"diam", row.diam},     {"vol0", row.vol0},
                {"volj", row.volj},     {"lp1", row.lp1},
                {"rescale", row.rescale}, {"best", report_to_json(row.best)},
                {"sweep_size", row.sweep.size()}};
        if (row.zcert_present) jr["zcert"] = zcert_to_json(row.zcert);
        rows.push_back(std::move(jr));
    }
    root["rows"] = std::move(rows);
    return root.dump(2) + "\n";
}

std::string render_series_csv(const RunResult& r) {
    std::string out = "j,delta,V_j,h,bound\n";
    for (const JRow& row : r.rows) {
        const BoundReport& b = row.best;
        const double vj_out = b.formula == "basic"
                                  ? b.volj_outside
                                  : b.vol0 / b.kappa + std::fabs(b.volj - b.vol0);
        out += std::to_string(row.j) + "," + fmt_g17(b.delta) + "," + fmt_g17(vj_out) + "," +
               fmt_g17(b.height) + "," + fmt_g17(b.value) + "\n";
    }
    return out;
}

std::string render_summary(const RunResult& r) {
    std::ostringstream ss;
    ss << "family " << r.cfg.family.name << ", resolution " << r.cfg.mesh.resolution
       << ", stencil " << r.cfg.mesh.stencil << ", landmarks " << r.cfg.pipeline.landmarks
       << "\n";
    ss << "volume cap V = " << r.vcap << "\n\n";
    for (const JRow& row : r.rows) {
        ss << "j=" << row.j << ": diam " << row.diam << ", vol0 " << row.vol0 << ", volj "
           << row.volj << ", |dg|_1 " << row.lp1 << "\n";
        ss << "  best " << row.best.formula << " bound " << row.best.value << "  (lambda "
           << row.best.lambda << ", kappa " << row.best.kappa << ", delta " << row.best.delta
           << ", h " << row.best.height << ")\n";
        if (row.rescale != 1.0) ss << "  domination restored by rescaling upper x" << row.rescale
                                   << "\n";
        if (row.zcert_present) {
            ss << "  glued space " << (row.zcert.ok ? "certified" : "NOT certified")
               << " (shortfall " << row.zcert.max_shortfall << " vs allowance "
               << row.zcert.shortfall_allowance << ")\n";
        }
    }
    return ss.str();
}

namespace {

void write_atomic(const std::filesystem::path& file, const std::string& text) {
    const std::filesystem::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out) throw std::runtime_error("short write " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

}  // namespace

void write_outputs(const RunResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_atomic(dir / "report.json", render_report_json(r));
    write_atomic(dir / "series.csv", render_series_csv(r));
    write_atomic(dir / "summary.txt", render_summary(r));
}

}  // namespace flatlab
