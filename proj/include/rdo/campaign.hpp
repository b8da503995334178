#pragma once

#include <map>
#include <string>
#include <vector>

#include "rdo/optimizer.hpp"

namespace rdo {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct CampaignConfig {
    RunConfig run;
    GeometryConfig geometry;
    CatalogConfig catalog;
    int study_samples = 100;
    std::uint64_t study_seed = 777;
    std::string out_dir = ".";

    // Enforces the mode coupling (dsp -> n = 1, lambda = 0; average ->
    // lambda = 0) and range checks; throws ConfigError.
    void validate_and_normalize();
};

// Flat-key JSON round trip. Unknown keys are rejected.
CampaignConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const CampaignConfig& cfg);
CampaignConfig load_config_file(const std::string& path);

// Runs one campaign and writes history.csv (streamed row by row),
// design.json, shape.dat, and config_echo.json into cfg.out_dir.
RunResult run_campaign(const CampaignConfig& cfg);

// design.json round trip (design plus lattice metadata).
void save_design(const DesignVector& d, const GeometryContext& ctx,
                 const CampaignConfig& cfg, const std::string& path);
DesignVector load_design(const std::string& path);

struct StudyResult {
    std::string design_id;
    bool degenerate = false;
    double e_cd = 0.0, var_cd = 0.0, cv_cd = 0.0;
    double e_cl = 0.0, var_cl = 0.0, cv_cl = 0.0;
    double lift_margin = 0.0;  // E[C_L] - sqrt(Var[C_L])
};

// Evaluates every design on one common set of m samples (common random
// numbers) and writes study.csv (per-sample scatter) and summary.csv.
std::vector<StudyResult> parameter_space_study(
    const GeometryContext& ctx, const ModelCatalog& catalog,
    const std::vector<std::pair<std::string, DesignVector>>& designs,
    std::uint64_t study_seed, int m, const UncertaintyConfig& ucfg,
    const std::string& out_dir);

std::vector<StudyResult> read_summary_csv(const std::string& path);

struct ComparisonRow {
    StudyResult stats;
    // Ratios relative to the first (baseline) row, same stat order.
    double r_e_cd = 1.0, r_var_cd = 1.0, r_cv_cd = 1.0;
    double r_e_cl = 1.0, r_var_cl = 1.0, r_cv_cl = 1.0, r_lift_margin = 1.0;
};

// Table-assembly step: one row per strategy with ratio columns relative to
// the first result (the deterministic single-point baseline by convention).
std::vector<ComparisonRow> compare_designs(const std::vector<StudyResult>& results);
std::string comparison_text_table(const std::vector<ComparisonRow>& rows);
void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path);

}  // namespace rdo
