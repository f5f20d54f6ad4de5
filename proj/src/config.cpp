#include "flatlab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace flatlab {

namespace {

using nlohmann::json;

void expect_keys(const json& obj, const std::string& where,
                 const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for '") + key + "'");
    }
}

void read_js(const json& obj, std::vector<int>& out) {
    const auto it = obj.find("j");
    if (it == obj.end()) return;
    try {
        if (it->is_number_integer()) {
            out = {it->get<int>()};
        } else {
            out = it->get<std::vector<int>>();
        }
    } catch (const json::exception&) {
        throw ConfigError("bad value for 'j'");
    }
}

}  // namespace

bool operator==(const FamilyConfig& a, const FamilyConfig& b) {
    return a.name == b.name && a.js == b.js && a.rho == b.rho &&
           a.well_depth == b.well_depth && a.h0 == b.h0 && a.profile == b.profile;
}
bool operator==(const MeshConfig& a, const MeshConfig& b) {
    return a.resolution == b.resolution && a.stencil == b.stencil && a.quad == b.quad;
}
bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
    return a.lambda_grid == b.lambda_grid && a.kappa_grid == b.kappa_grid &&
           a.landmarks == b.landmarks && a.seed == b.seed && a.zlevels == b.zlevels &&
           a.zverify == b.zverify;
}
bool operator==(const OutputConfig& a, const OutputConfig& b) {
    return a.dir == b.dir && a.cache_dir == b.cache_dir && a.threads == b.threads;
}
bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.schema_version == b.schema_version && a.family == b.family && a.mesh == b.mesh &&
           a.pipeline == b.pipeline && a.output == b.output;
}

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    expect_keys(root, "config", {"schema_version", "family", "mesh", "pipeline", "output"});

    RunConfig cfg;
    read(root, "schema_version", cfg.schema_version);
    if (cfg.schema_version != 1) throw ConfigError("unsupported schema_version");

    if (root.contains("family")) {
        const json& f = root["family"];
        expect_keys(f, "family", {"name", "j", "rho", "R", "h0", "profile"});
        read(f, "name", cfg.family.name);
        read_js(f, cfg.family.js);
        read(f, "rho", cfg.family.rho);
        read(f, "R", cfg.family.well_depth);
        read(f, "h0", cfg.family.h0);
        read(f, "profile", cfg.family.profile);
    }
    if (root.contains("mesh")) {
        const json& m = root["mesh"];
        expect_keys(m, "mesh", {"resolution", "stencil", "quad"});
        read(m, "resolution", cfg.mesh.resolution);
        read(m, "stencil", cfg.mesh.stencil);
        read(m, "quad", cfg.mesh.quad);
    }
    if (root.contains("pipeline")) {
        const json& p = root["pipeline"];
        expect_keys(p, "pipeline",
                    {"lambda_grid", "kappa_grid", "landmarks", "seed", "zlevels", "zverify"});
        read(p, "lambda_grid", cfg.pipeline.lambda_grid);
        read(p, "kappa_grid", cfg.pipeline.kappa_grid);
        read(p, "landmarks", cfg.pipeline.landmarks);
        read(p, "seed", cfg.pipeline.seed);
        read(p, "zlevels", cfg.pipeline.zlevels);
        read(p, "zverify", cfg.pipeline.zverify);
    }
    if (root.contains("output")) {
        const json& o = root["output"];
        expect_keys(o, "output", {"dir", "cache_dir", "threads"});
        read(o, "dir", cfg.output.dir);
        read(o, "cache_dir", cfg.output.cache_dir);
        read(o, "threads", cfg.output.threads);
    }
    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) {
    // nlohmann::json objects iterate in sorted key order, so this is canonical.
    json root;
    root["schema_version"] = cfg.schema_version;
    root["family"] = {{"name", cfg.family.name},   {"j", cfg.family.js},
                      {"rho", cfg.family.rho},     {"R", cfg.family.well_depth},
                      {"h0", cfg.family.h0},       {"profile", cfg.family.profile}};
    root["mesh"] = {{"resolution", cfg.mesh.resolution},
                    {"stencil", cfg.mesh.stencil},
                    {"quad", cfg.mesh.quad}};
    root["pipeline"] = {{"lambda_grid", cfg.pipeline.lambda_grid},
                        {"kappa_grid", cfg.pipeline.kappa_grid},
                        {"landmarks", cfg.pipeline.landmarks},
                        {"seed", cfg.pipeline.seed},
                        {"zlevels", cfg.pipeline.zlevels},
                        {"zverify", cfg.pipeline.zverify}};
    root["output"] = {{"dir", cfg.output.dir},
                      {"cache_dir", cfg.output.cache_dir},
                      {"threads", cfg.output.threads}};
    return root.dump(2);
}

void validate_config(const RunConfig& cfg) {
    static const std::set<std::string> kFamilies = {
        "ilmanen", "finsler-torus", "cinched-sphere", "bump-sphere", "identical", "grid"};
    if (!kFamilies.count(cfg.family.name))
        throw ConfigError("unknown family '" + cfg.family.name + "'");
    if (cfg.family.js.empty()) throw ConfigError("family needs at least one index j");
    for (const int j : cfg.family.js) {
        if (j < 1 || j > 12) throw ConfigError("family index j must be in [1,12]");
    }
    if (cfg.family.rho < 0.0) throw ConfigError("rho must be >= 0");
    if (cfg.family.well_depth <= 0.0) throw ConfigError("R must be > 0");
    if (!(cfg.family.h0 > 0.0 && cfg.family.h0 < 1.0)) throw ConfigError("h0 must be in (0,1)");
    if (cfg.mesh.resolution < 8) throw ConfigError("resolution must be >= 8");
    if (cfg.mesh.stencil < 1 || cfg.mesh.stencil > 3) throw ConfigError("stencil must be 1..3");
    if (cfg.mesh.quad != 1 && cfg.mesh.quad != 2 && cfg.mesh.quad != 4)
        throw ConfigError("quad must be 1, 2 or 4");
    if (cfg.pipeline.lambda_grid.empty() || cfg.pipeline.kappa_grid.empty())
        throw ConfigError("parameter grids must be non-empty");
    for (const double l : cfg.pipeline.lambda_grid) {
        if (!(l > 0.0)) throw ConfigError("lambda grid entries must be > 0");
    }
    for (const double k : cfg.pipeline.kappa_grid) {
        if (!(k >= 1.0)) throw ConfigError("kappa grid entries must be >= 1");
    }
    if (cfg.pipeline.landmarks < 2) throw ConfigError("landmarks must be >= 2");
    if (cfg.pipeline.zlevels < 2) throw ConfigError("zlevels must be >= 2");
    if (cfg.output.threads < 1) throw ConfigError("threads must be >= 1");
    if (cfg.output.dir.empty()) throw ConfigError("output dir must be non-empty");
}

}  // namespace flatlab
