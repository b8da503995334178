#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdo/campaign.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericalAbort = 3;

struct Overrides {
    std::string config_path;
    std::string out_dir;
    std::string mode;
    double lambda = 0.0;
    int n = 0;
    double eta = 0.0;
    int iters = 0;
    std::uint64_t seed = 0;
    bool has_lambda = false, has_n = false, has_eta = false, has_iters = false,
         has_seed = false;
};

rdo::CampaignConfig build_config(const Overrides& o) {
    rdo::CampaignConfig cfg;
    if (!o.config_path.empty()) cfg = rdo::load_config_file(o.config_path);
    if (!o.mode.empty()) cfg.run.mode = rdo::parse_mode(o.mode);
    if (o.has_lambda) cfg.run.lambda = o.lambda;
    if (o.has_n) cfg.run.n = o.n;
    if (o.has_eta) cfg.run.eta = o.eta;
    if (o.has_iters) cfg.run.iterations = o.iters;
    if (o.has_seed) cfg.run.seed = o.seed;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    cfg.validate_and_normalize();
    return cfg;
}

void write_abort_diagnostics(const std::string& out_dir, int iteration,
                             const std::string& what) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream diag(std::filesystem::path(out_dir) / "abort_diagnostics.txt");
    diag << "failing_iteration: " << iteration << "\n" << what << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic-gradient robust airfoil design optimization"};
    app.require_subcommand(1);

    Overrides o;
    std::vector<std::string> design_paths;
    std::vector<std::string> summary_paths;

    auto add_common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON config file");
        sub->add_option("--out", o.out_dir, "output directory");
        sub->add_option("--seed", o.seed, "RNG seed")->each([&o](const std::string&) {
            o.has_seed = true;
        });
    };

    CLI::App* run = app.add_subcommand("run", "run one optimization campaign");
    add_common(run);
    run->add_option("--mode", o.mode, "dsp | average | robust");
    run->add_option("--lambda", o.lambda, "robustness weight")
        ->each([&o](const std::string&) { o.has_lambda = true; });
    run->add_option("--n", o.n, "samples per iteration")
        ->each([&o](const std::string&) { o.has_n = true; });
    run->add_option("--eta", o.eta, "step size")
        ->each([&o](const std::string&) { o.has_eta = true; });
    run->add_option("--iters", o.iters, "iteration budget")
        ->each([&o](const std::string&) { o.has_iters = true; });

    CLI::App* study =
        app.add_subcommand("study", "common-random-number study over saved designs");
    add_common(study);
    study->add_option("designs", design_paths, "design.json files")->required();

    CLI::App* compare = app.add_subcommand("compare", "assemble the comparison table");
    compare->add_option("--out", o.out_dir, "output directory");
    compare->add_option("summaries", summary_paths, "summary.csv files (baseline first)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    try {
        if (run->parsed()) {
            const rdo::CampaignConfig cfg = build_config(o);
            try {
                const rdo::RunResult res = rdo::run_campaign(cfg);
                std::printf("campaign %s finished: %d iterations, %llu evaluations\n",
                            rdo::mode_name(cfg.run.mode).c_str(), cfg.run.iterations,
                            static_cast<unsigned long long>(res.evaluations));
            } catch (const rdo::NumericalAbortError& e) {
                write_abort_diagnostics(cfg.out_dir, e.iteration, e.what());
                std::fprintf(stderr, "numerical abort: %s\n", e.what());
                return kExitNumericalAbort;
            }
        } else if (study->parsed()) {
            rdo::CampaignConfig cfg;
            if (!o.config_path.empty()) cfg = rdo::load_config_file(o.config_path);
            if (o.has_seed) cfg.study_seed = o.seed;
            if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
            cfg.validate_and_normalize();
            const rdo::GeometryContext ctx(cfg.geometry);
            const rdo::ModelCatalog catalog = rdo::model_catalog(cfg.catalog);
            std::vector<std::pair<std::string, rdo::DesignVector>> designs;
            for (const auto& path : design_paths)
                designs.emplace_back(std::filesystem::path(path).parent_path().filename().string() +
                                         "/" + std::filesystem::path(path).stem().string(),
                                     rdo::load_design(path));
            const auto results = rdo::parameter_space_study(
                ctx, catalog, designs, cfg.study_seed, cfg.study_samples,
                cfg.run.uncertainty, cfg.out_dir);
            for (const auto& r : results)
                if (r.degenerate)
                    std::fprintf(stderr, "warning: design %s is degenerate\n",
                                 r.design_id.c_str());
            std::printf("study finished: %zu designs, %d samples each\n", results.size(),
                        cfg.study_samples);
        } else if (compare->parsed()) {
            std::vector<rdo::StudyResult> all;
            for (const auto& path : summary_paths) {
                const auto rows = rdo::read_summary_csv(path);
                all.insert(all.end(), rows.begin(), rows.end());
            }
            const auto table = rdo::compare_designs(all);
            std::fputs(rdo::comparison_text_table(table).c_str(), stdout);
            const std::string dir = o.out_dir.empty() ? "." : o.out_dir;
            std::filesystem::create_directories(dir);
            rdo::write_comparison_csv(table,
                                      (std::filesystem::path(dir) / "comparison.csv").string());
        }
    } catch (const rdo::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const rdo::NumericalAbortError& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return kExitNumericalAbort;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
