#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "flatlab/util.hpp"

namespace flatlab {

// Experiment configuration.  Parsing is strict: unknown keys anywhere are a
// ConfigError, so a typo can never silently fall back to a default.  Dumping
// is canonical (sorted keys, shortest round-tripping numbers), and
// parse(dump(c)) == c exactly.

struct FamilyConfig {
    std::string name = "ilmanen";
    std::vector<int> js = {1, 2, 4, 8};
    double rho = 0.0;        // well radius; 0 means the family default 1/j^2
    double well_depth = 1.0; // JSON key "R": radial length added by one well wall
    double h0 = 0.5;         // cinch floor fraction
    std::string profile;     // family-specific knob: bump "amp,width"; grid CSV path
};

struct MeshConfig {
    int resolution = 64;  // sphere: nu (nv = 2 nu); torus: nu (nv family-dependent)
    int stencil = 2;
    int quad = 4;
};

struct PipelineConfig {
    std::vector<double> lambda_grid = {0.05, 0.1, 0.2, 0.4, 0.8};
    std::vector<double> kappa_grid = {2.0, 4.0, 8.0};
    int landmarks = 12;
    unsigned seed = 0;
    int zlevels = 3;
    bool zverify = false;  // also certify the glued space per family index
};

struct OutputConfig {
    std::string dir = "out";
    std::string cache_dir;  // empty: no distance cache
    int threads = 1;
};

struct RunConfig {
    int schema_version = 1;
    FamilyConfig family;
    MeshConfig mesh;
    PipelineConfig pipeline;
    OutputConfig output;
};

bool operator==(const FamilyConfig&, const FamilyConfig&);
bool operator==(const MeshConfig&, const MeshConfig&);
bool operator==(const PipelineConfig&, const PipelineConfig&);
bool operator==(const OutputConfig&, const OutputConfig&);
bool operator==(const RunConfig&, const RunConfig&);

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& file);
std::string dump_config(const RunConfig& cfg);

// Field-level validation shared by parsing and programmatic construction.
void validate_config(const RunConfig& cfg);

}  // namespace flatlab
