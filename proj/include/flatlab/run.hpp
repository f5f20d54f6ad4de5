#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "flatlab/compare.hpp"
#include "flatlab/config.hpp"
#include "flatlab/flatbound.hpp"
#include "flatlab/goodset.hpp"
#include "flatlab/zspace.hpp"

namespace flatlab {

// One family member, normalized so that `upper` pointwise dominates `lower`.
// Families whose construction shrinks the base metric (cinched sphere,
// spiked torus) come out with the base on the upper side, recorded in
// base_is_upper; the flat-distance estimates are symmetric in the pair, so
// downstream code only ever sees the (lower, upper) roles.
struct FamilyInstance {
    std::string name;
    int j = 0;
    std::shared_ptr<const ParamChart> chart;
    FieldPtr lower;
    FieldPtr upper;
    bool base_is_upper = false;
    double rescale = 1.0;  // factor applied to upper to restore domination
    double crossing_excess = 0.0;  // wells: radial crossing is longer by this
};

FamilyInstance make_family(const RunConfig& cfg, int j);

// Per-node SPD tensors from CSV: header "kind,nu,nv", then one "xx,xy,yy" row
// per lattice node (sphere: (nu+1)*nv rows, u from 0 to pi inclusive; torus:
// nu*nv rows, both axes periodic), v fastest.
FieldPtr load_grid_csv(const std::filesystem::path& file);

struct JRow {
    int j = 0;
    double tau = 0.0;
    double diam = 0.0;
    double vol0 = 0.0;
    double volj = 0.0;
    double lp1 = 0.0;
    double rescale = 1.0;
    BoundReport best;                 // winner of the parameter sweep
    std::vector<BoundReport> sweep;   // every feasible grid evaluation
    ZCertificate zcert;               // populated when pipeline.zverify
    bool zcert_present = false;
};

struct RunResult {
    RunConfig cfg;
    std::vector<JRow> rows;
    double vcap = 0.0;
};

// Executes the full pipeline: mesh, domination gate (with the 1/(2j)
// rescaling fallback), volumes, diameter, landmark universe, parameter sweep,
// optional glued-space certification.  Throws InfeasibleError when a family
// member fails the domination gate or its whole parameter grid is infeasible.
RunResult run_experiment(const RunConfig& cfg);

std::string render_report_json(const RunResult& r);
std::string render_series_csv(const RunResult& r);
std::string render_summary(const RunResult& r);

// Writes report.json, series.csv and summary.txt atomically under dir.
void write_outputs(const RunResult& r, const std::filesystem::path& dir);

}  // namespace flatlab
