// Command-line front end: every subcommand builds on the library pipeline and
// prints a single JSON document (or, for `run`, writes the report files).
// Exit codes: 0 ok, 2 infeasible input pair, 3 violated invariant, 4 bad
// input or configuration.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "flatlab/cache.hpp"
#include "flatlab/compare.hpp"
#include "flatlab/config.hpp"
#include "flatlab/flatbound.hpp"
#include "flatlab/goodset.hpp"
#include "flatlab/run.hpp"
#include "flatlab/tubes.hpp"
#include "flatlab/zspace.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
using namespace flatlab;

struct Cli {
    std::string config;
    std::string out;
    std::string cache_dir;
    std::string family;
    unsigned seed = 0;
    int threads = 0;
    int resolution = 0;
    int stencil = 0;
    int j = 0;
    double kappa = 0.0;
    double lambda_prime = 0.0;
    int landmarks = 0;
    int levels = 0;
};

// Shared option block; each subcommand opts into the flags it honours.
void add_common(CLI::App* cmd, Cli& c, bool with_family) {
    cmd->add_option("--config", c.config, "JSON config file; flags override it");
    cmd->add_option("--seed", c.seed, "deterministic seed");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--cache-dir", c.cache_dir, "distance cache directory");
    cmd->add_option("--threads", c.threads, "worker threads for landmark rows");
    cmd->add_option("--resolution", c.resolution, "mesh resolution (u axis)");
    cmd->add_option("--stencil", c.stencil, "stencil order 1..3");
    cmd->add_option("--j", c.j, "family index");
    cmd->add_option("--kappa", c.kappa, "good-set kappa");
    cmd->add_option("--lambda-prime", c.lambda_prime, "good-set closeness scale");
    cmd->add_option("--landmarks", c.landmarks, "landmark count");
    cmd->add_option("--levels", c.levels, "slab levels for the glued space");
    if (with_family) cmd->add_option("--family", c.family, "family name");
}

RunConfig assemble(const Cli& c, const CLI::App* cmd) {
    RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
    if (cmd->count("--seed")) cfg.pipeline.seed = c.seed;
    if (!c.out.empty()) cfg.output.dir = c.out;
    if (cmd->count("--cache-dir")) cfg.output.cache_dir = c.cache_dir;
    if (c.threads > 0) cfg.output.threads = c.threads;
    if (c.resolution > 0) cfg.mesh.resolution = c.resolution;
    if (c.stencil > 0) cfg.mesh.stencil = c.stencil;
    if (!c.family.empty()) cfg.family.name = c.family;
    if (c.j > 0) cfg.family.js = {c.j};
    if (c.kappa > 0.0) cfg.pipeline.kappa_grid = {c.kappa};
    if (c.lambda_prime > 0.0) cfg.pipeline.lambda_grid = {c.lambda_prime};
    if (c.landmarks > 0) cfg.pipeline.landmarks = c.landmarks;
    if (c.levels > 0) cfg.pipeline.zlevels = c.levels;
    validate_config(cfg);
    return cfg;
}

Vec2 parse_point(const std::string& s) {
    std::istringstream ss(s);
    Vec2 p;
    char comma = 0;
    if (!(ss >> p.u >> comma >> p.v) || comma != ',')
        throw ConfigError("point must be 'u,v', got '" + s + "'");
    return p;
}

// Builds one family member with edge lengths; the measuring backbone of the
// one-shot subcommands.
struct Instance {
    FamilyInstance fam;
    MeshGraph graph;
    EdgeLengths wl, wu;
};

Instance instantiate(const RunConfig& cfg) {
    Instance inst;
    inst.fam = make_family(cfg, cfg.family.js.front());
    inst.graph = MeshGraph::build(inst.fam.chart, cfg.mesh.stencil);
    inst.wl = edge_lengths(inst.graph, *inst.fam.lower, cfg.mesh.quad);
    inst.wu = edge_lengths(inst.graph, *inst.fam.upper, cfg.mesh.quad);
    return inst;
}

struct GoodSetRun {
    Instance inst;
    LandmarkSet lm;
    PairSample ps;
    Selection sel;
    double lambda = 0.0;
    double tau = 0.0;
    double diam = 0.0;
};

GoodSetRun run_goodset(const RunConfig& cfg) {
    GoodSetRun g;
    g.inst = instantiate(cfg);
    const DistanceCache cache{cfg.output.cache_dir};
    g.lm = build_landmarks(g.inst.graph, g.inst.wl, g.inst.wu, *g.inst.fam.lower,
                           *g.inst.fam.upper, cfg.pipeline.landmarks, cfg.pipeline.seed, cache,
                           cfg.output.threads);
    g.ps = make_pairs(g.lm);
    g.lambda = cfg.pipeline.lambda_grid.front();
    const double kappa = cfg.pipeline.kappa_grid.front();
    const double eps = epsilon_for_scale(g.lm, g.lambda, kappa);
    if (!(eps > 0.0 && eps < 1.0) || kappa * eps >= 1.0)
        throw InfeasibleError("derived eps " + std::to_string(eps) +
                              " leaves no admissible good set");
    g.sel = select_good_set(g.lm, g.ps, eps, kappa);
    g.tau = mesh_tolerance(cfg.mesh.resolution, cfg.mesh.stencil, cfg.mesh.quad);
    g.diam = diameter_estimate(g.inst.graph, g.inst.wu, 8, cfg.pipeline.seed) * (1.0 + g.tau);
    return g;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_mesh_build(const Cli& c, const CLI::App* cmd, const std::string& kind) {
    RunConfig cfg = assemble(c, cmd);
    const ChartKind ck = kind == "torus" ? ChartKind::Torus : ChartKind::Sphere;
    const auto chart = ParamChart::make(ck, cfg.mesh.resolution,
                                        (ck == ChartKind::Sphere ? 2 : 1) * cfg.mesh.resolution);
    const MeshGraph g = MeshGraph::build(chart, cfg.mesh.stencil);
    double area = 0.0;
    for (std::size_t i = 0; i < chart->n_nodes(); ++i) area += chart->dual_area(i);
    print(json{{"kind", kind},
               {"nodes", chart->n_nodes()},
               {"edges", g.edges().size()},
               {"dual_area_sum", area},
               {"hash", hex64(g.content_hash())}});
    return 0;
}

int cmd_dist(const Cli& c, const CLI::App* cmd, const std::string& which,
             const std::string& from, const std::string& to) {
    const RunConfig cfg = assemble(c, cmd);
    const Instance inst = instantiate(cfg);
    const Vec2 a = parse_point(from), b = parse_point(to);
    const std::size_t na = nearest_node(*inst.fam.chart, a);
    const std::size_t nb = nearest_node(*inst.fam.chart, b);
    const EdgeLengths& w = which == "upper" ? inst.wu : inst.wl;
    const double d = graph_distance(inst.graph, w, na, nb);
    print(json{{"family", inst.fam.name},
               {"j", inst.fam.j},
               {"metric", which},
               {"from_node", na},
               {"to_node", nb},
               {"distance", d}});
    return 0;
}

int cmd_volume(const Cli& c, const CLI::App* cmd) {
    const RunConfig cfg = assemble(c, cmd);
    const Instance inst = instantiate(cfg);
    print(json{{"family", inst.fam.name},
               {"j", inst.fam.j},
               {"vol_lower", total_volume(*inst.fam.chart, *inst.fam.lower)},
               {"vol_upper", total_volume(*inst.fam.chart, *inst.fam.upper)}});
    return 0;
}

int cmd_goodset(const Cli& c, const CLI::App* cmd) {
    const RunConfig cfg = assemble(c, cmd);
    const GoodSetRun g = run_goodset(cfg);
    const GoodSetCheck chk = verify_good_set(g.lm, g.sel, g.ps, g.lambda, g.tau, g.diam);
    std::size_t wsize = 0;
    for (const char f : g.sel.in_w) wsize += f != 0;
    print(json{{"eps", g.sel.eps},
               {"kappa", g.sel.kappa},
               {"delta", g.sel.delta},
               {"landmarks", g.lm.count()},
               {"w_size", wsize},
               {"vol0_outside", g.sel.vol0_outside},
               {"volj_outside", g.sel.volj_outside},
               {"retained_weight", g.sel.retained_weight},
               {"masses_dominated", g.sel.masses_dominated},
               {"threshold_strict", g.sel.threshold_strict},
               {"check_ok", chk.ok},
               {"worst_excess", chk.worst_excess},
               {"allowance", chk.allowance},
               {"min_intersection", chk.min_intersection},
               {"intersection_bound", chk.intersection_bound}});
    return 0;
}

int cmd_zspace_verify(const Cli& c, const CLI::App* cmd) {
    RunConfig cfg = assemble(c, cmd);
    // Certification defaults when neither a config file nor flags pin them.
    if (c.config.empty() && !cmd->count("--lambda-prime")) cfg.pipeline.lambda_grid = {0.2};
    if (c.config.empty() && !cmd->count("--kappa")) cfg.pipeline.kappa_grid = {4.0};
    if (cfg.family.js.size() > 1) cfg.family.js = {cfg.family.js.front()};
    cfg.pipeline.zverify = true;
    const RunResult res = run_experiment(cfg);
    const JRow& row = res.rows.front();
    json out = json::parse(render_report_json(res))["rows"][0]["zcert"];
    out["family"] = cfg.family.name;
    out["j"] = row.j;
    out["height"] = row.best.height;
    print(out);
    return row.zcert.ok ? 0 : 3;
}

int cmd_flatbound(const Cli& c, const CLI::App* cmd) {
    const RunConfig cfg = assemble(c, cmd);
    const RunResult res = run_experiment(cfg);
    print(json::parse(render_report_json(res)));
    return 0;
}

int cmd_tubes(const Cli& c, const CLI::App* cmd, const TubeSpec& spec) {
    const RunConfig cfg = assemble(c, cmd);
    const Instance inst = instantiate(cfg);
    const TubeReport rep = analyze_tube(*inst.fam.lower, *inst.fam.upper, spec);
    print(json{{"family", inst.fam.name},
               {"j", inst.fam.j},
               {"mean_excess", rep.mean_excess},
               {"max_excess", rep.max_excess},
               {"min_excess", rep.min_excess},
               {"vol0", rep.vol0},
               {"volj", rep.volj},
               {"voldiff", rep.voldiff},
               {"transversal_floor", rep.transversal_floor},
               {"leaf_sum", rep.leaf_sum},
               {"chain_rhs", rep.chain_rhs},
               {"slack", rep.slack},
               {"chain_ok", rep.chain_ok}});
    return 0;
}

// Closed-form limit distance of the spiked-torus family: the limit norm mixes
// cheap circle travel (cost 1 per radian along a spike) with direct travel in
// the flat metric diag(1, 25); straight-line geodesics give
//   F(s,t) = t + s*sqrt(24)/5          when t >= s/sqrt(600),
//   F(s,t) = sqrt(s^2 + 25 t^2)        otherwise,
// minimized over the four wrapped displacement representatives.
double finsler_limit_distance(Vec2 a, Vec2 b) {
    const double s = std::fabs(wrap_pi(b.u - a.u));
    const double t = std::fabs(wrap_pi(b.v - a.v));
    auto norm = [](double ds, double dt) {
        if (dt >= ds / std::sqrt(600.0)) return dt + ds * std::sqrt(24.0) / 5.0;
        return std::sqrt(ds * ds + 25.0 * dt * dt);
    };
    double best = norm(s, t);
    best = std::min(best, norm(kTwoPi - s, t));
    best = std::min(best, norm(s, kTwoPi - t));
    best = std::min(best, norm(kTwoPi - s, kTwoPi - t));
    return best;
}

int cmd_example(const Cli& c, const CLI::App* cmd, const std::string& name) {
    Cli local = c;
    if (local.family.empty()) local.family = name;
    RunConfig cfg = assemble(local, cmd);
    if (cfg.family.js.size() != 1) cfg.family.js = {4};

    if (name == "ilmanen") {
        cfg.pipeline.zverify = true;
        const RunResult res = run_experiment(cfg);
        const int j = cfg.family.js.front();
        const Instance inst = instantiate(cfg);
        const double dpole = graph_distance(inst.graph, inst.wu,
                                            inst.fam.chart->north_pole(),
                                            inst.fam.chart->south_pole());
        const double expected = kPi + (j >= 2 ? 2.0 : 1.0) * cfg.family.well_depth;
        json out = json::parse(render_report_json(res));
        out["pole_distance"] = {{"measured", dpole},
                                {"expected", expected},
                                {"rel_error", std::fabs(dpole - expected) / expected}};
        print(out);
        return 0;
    }
    if (name == "finsler-torus") {
        const Instance inst = instantiate(cfg);
        const std::vector<std::pair<Vec2, Vec2>> pairs = {
            {{0.0, 0.0}, {0.0, kPi / 2}},
            {{0.0, 0.0}, {0.0, kPi}},
            {{0.0, 0.0}, {kPi / 2, 0.0}},
            {{0.0, 0.0}, {kPi / 2, kPi / 2}},
        };
        json rows = json::array();
        for (const auto& [a, b] : pairs) {
            const std::size_t na = nearest_node(*inst.fam.chart, a);
            const std::size_t nb = nearest_node(*inst.fam.chart, b);
            const double dj = graph_distance(inst.graph, inst.wl, na, nb);
            const double dinf = finsler_limit_distance(a, b);
            rows.push_back(json{{"from", {a.u, a.v}},
                                {"to", {b.u, b.v}},
                                {"d_j", dj},
                                {"d_limit", dinf},
                                {"ratio", dj / dinf}});
        }
        print(json{{"family", name}, {"j", cfg.family.js.front()}, {"pairs", rows}});
        return 0;
    }
    throw ConfigError("example supports 'ilmanen' and 'finsler-torus'");
}

int cmd_run(const Cli& c, const CLI::App* cmd) {
    const RunConfig cfg = assemble(c, cmd);
    const RunResult res = run_experiment(cfg);
    write_outputs(res, cfg.output.dir);
    std::cout << render_summary(res);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flat-distance bounds for dominated metric pairs on closed surfaces"};
    app.require_subcommand(1);
    Cli c;

    std::string kind = "sphere", which = "lower", from = "0,0", to = "0,0", example_name;
    TubeSpec tspec;
    tspec.u_lo = 0.4;
    tspec.u_hi = kPi - 0.4;
    tspec.v_lo = 1.0;
    tspec.v_hi = 1.4;
    bool along_v = false;

    CLI::App* mesh = app.add_subcommand("mesh-build", "build a chart and report its graph");
    mesh->add_option("--kind", kind, "sphere or torus")
        ->check(CLI::IsMember({"sphere", "torus"}));
    add_common(mesh, c, false);

    CLI::App* dist = app.add_subcommand("dist", "graph distance between two chart points");
    dist->add_option("--metric", which, "lower or upper")
        ->check(CLI::IsMember({"lower", "upper"}));
    dist->add_option("--from", from, "start point 'u,v'");
    dist->add_option("--to", to, "end point 'u,v'");
    add_common(dist, c, true);

    CLI::App* vol = app.add_subcommand("volume", "areas of both metrics of a family member");
    add_common(vol, c, true);

    CLI::App* good = app.add_subcommand("goodset", "good-set selection and its checks");
    add_common(good, c, true);

    CLI::App* zv = app.add_subcommand("zspace-verify", "certify the glued comparison space");
    add_common(zv, c, true);

    CLI::App* fb = app.add_subcommand("flatbound", "parameter sweep and best bound report");
    add_common(fb, c, true);

    CLI::App* tb = app.add_subcommand("tubes", "leaf-versus-volume comparison on a tube");
    tb->add_option("--u-lo", tspec.u_lo);
    tb->add_option("--u-hi", tspec.u_hi);
    tb->add_option("--v-lo", tspec.v_lo);
    tb->add_option("--v-hi", tspec.v_hi);
    tb->add_option("--leaves", tspec.leaves);
    tb->add_option("--steps", tspec.steps);
    tb->add_flag("--along-v", along_v, "foliate by v-lines instead of u-lines");
    add_common(tb, c, true);

    CLI::App* ex = app.add_subcommand("example", "canned demonstration runs");
    ex->add_option("name", example_name, "ilmanen or finsler-torus")->required();
    add_common(ex, c, true);

    CLI::App* run = app.add_subcommand("run", "full experiment; writes report files");
    add_common(run, c, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 4;
    }

    try {
        if (mesh->parsed()) return cmd_mesh_build(c, mesh, kind);
        if (dist->parsed()) return cmd_dist(c, dist, which, from, to);
        if (vol->parsed()) return cmd_volume(c, vol);
        if (good->parsed()) return cmd_goodset(c, good);
        if (zv->parsed()) return cmd_zspace_verify(c, zv);
        if (fb->parsed()) return cmd_flatbound(c, fb);
        if (tb->parsed()) {
            tspec.leaves_along_u = !along_v;
            return cmd_tubes(c, tb, tspec);
        }
        if (ex->parsed()) return cmd_example(c, ex, example_name);
        if (run->parsed()) return cmd_run(c, run);
        std::cerr << "no subcommand\n";
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return 4;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const InvariantError& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
