#include "rdo/campaign.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rdo/batch.hpp"
#include "rdo/csv.hpp"

namespace rdo {

namespace {

using nlohmann::json;

std::string algorithm_name(Algorithm a) {
    return a == Algorithm::adagrad ? "adagrad" : "sgd";
}

Algorithm parse_algorithm(const std::string& s) {
    if (s == "adagrad") return Algorithm::adagrad;
    if (s == "sgd") return Algorithm::sgd;
    throw ConfigError("unknown algorithm: " + s);
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "mode", "n", "lambda", "eta", "iterations", "seed", "algorithm", "epsilon",
        "study_samples", "study_seed", "out_dir",
        "re_min", "re_max", "log_uniform_re",
        "m_factors", "k_p", "kappa", "c_l_star", "vol_tol",
        "n_per_surface", "nx", "ny", "margin_x", "margin_y", "n_quad",
        "dy_max", "alpha_min_deg", "alpha_max_deg"};
    return keys;
}

template <typename T, std::size_t N>
void read_array(const json& j, const char* key, std::array<T, N>& out) {
    if (!j.contains(key)) return;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != N)
        throw ConfigError(std::string(key) + " must be an array of " + std::to_string(N));
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i].get<T>();
}

}  // namespace

void CampaignConfig::validate_and_normalize() {
    if (run.mode == Mode::dsp) {
        run.n = 1;
        run.lambda = 0.0;
    } else if (run.mode == Mode::average) {
        run.lambda = 0.0;
    }
    run.robust.lambda = run.lambda;
    if (run.n < 1) throw ConfigError("n must be >= 1");
    if (run.iterations < 1) throw ConfigError("iterations must be >= 1");
    if (run.eta <= 0.0) throw ConfigError("eta must be positive");
    if (run.lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (run.epsilon <= 0.0) throw ConfigError("epsilon must be positive");
    if (study_samples < 2) throw ConfigError("study_samples must be >= 2");
    if (!(run.uncertainty.re_min >= 1e6 && run.uncertainty.re_max <= 1e7 &&
          run.uncertainty.re_min < run.uncertainty.re_max))
        throw ConfigError("Reynolds range must satisfy 1e6 <= re_min < re_max <= 1e7");
    for (double k : run.robust.kappa)
        if (k < 0.0) throw ConfigError("kappa entries must be >= 0");
    if (run.robust.c_l_star <= 0.0) throw ConfigError("c_l_star must be positive");
    if (run.robust.vol_tol < 0.0) throw ConfigError("vol_tol must be >= 0");
    if (geometry.n_per_surface < 50) throw ConfigError("n_per_surface must be >= 50");
    if (geometry.nx < 3 || geometry.ny < 2) throw ConfigError("lattice needs nx >= 3, ny >= 2");
    if (geometry.n_quad < 16) throw ConfigError("n_quad must be >= 16");
    if (geometry.dy_max <= 0.0) throw ConfigError("dy_max must be positive");
    if (geometry.alpha_min_deg >= geometry.alpha_max_deg)
        throw ConfigError("alpha bounds must satisfy alpha_min_deg < alpha_max_deg");
}

CampaignConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known_keys().count(key)) throw ConfigError("unknown config key: " + key);

    CampaignConfig cfg;
    try {
        if (j.contains("mode")) cfg.run.mode = parse_mode(j.at("mode").get<std::string>());
        if (j.contains("n")) cfg.run.n = j.at("n").get<int>();
        if (j.contains("lambda")) cfg.run.lambda = j.at("lambda").get<double>();
        if (j.contains("eta")) cfg.run.eta = j.at("eta").get<double>();
        if (j.contains("iterations")) cfg.run.iterations = j.at("iterations").get<int>();
        if (j.contains("seed")) cfg.run.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("algorithm"))
            cfg.run.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
        if (j.contains("epsilon")) cfg.run.epsilon = j.at("epsilon").get<double>();
        if (j.contains("study_samples")) cfg.study_samples = j.at("study_samples").get<int>();
        if (j.contains("study_seed")) cfg.study_seed = j.at("study_seed").get<std::uint64_t>();
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("re_min")) cfg.run.uncertainty.re_min = j.at("re_min").get<double>();
        if (j.contains("re_max")) cfg.run.uncertainty.re_max = j.at("re_max").get<double>();
        if (j.contains("log_uniform_re"))
            cfg.run.uncertainty.log_uniform_re = j.at("log_uniform_re").get<bool>();
        read_array(j, "m_factors", cfg.catalog.m_factors);
        read_array(j, "k_p", cfg.catalog.k_p);
        read_array(j, "kappa", cfg.run.robust.kappa);
        if (j.contains("c_l_star")) cfg.run.robust.c_l_star = j.at("c_l_star").get<double>();
        if (j.contains("vol_tol")) cfg.run.robust.vol_tol = j.at("vol_tol").get<double>();
        if (j.contains("n_per_surface"))
            cfg.geometry.n_per_surface = j.at("n_per_surface").get<int>();
        if (j.contains("nx")) cfg.geometry.nx = j.at("nx").get<int>();
        if (j.contains("ny")) cfg.geometry.ny = j.at("ny").get<int>();
        if (j.contains("margin_x")) cfg.geometry.margin_x = j.at("margin_x").get<double>();
        if (j.contains("margin_y")) cfg.geometry.margin_y = j.at("margin_y").get<double>();
        if (j.contains("n_quad")) cfg.geometry.n_quad = j.at("n_quad").get<int>();
        if (j.contains("dy_max")) cfg.geometry.dy_max = j.at("dy_max").get<double>();
        if (j.contains("alpha_min_deg"))
            cfg.geometry.alpha_min_deg = j.at("alpha_min_deg").get<double>();
        if (j.contains("alpha_max_deg"))
            cfg.geometry.alpha_max_deg = j.at("alpha_max_deg").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
    cfg.validate_and_normalize();
    return cfg;
}

std::string config_to_json_text(const CampaignConfig& cfg) {
    json j;
    j["mode"] = mode_name(cfg.run.mode);
    j["n"] = cfg.run.n;
    j["lambda"] = cfg.run.lambda;
    j["eta"] = cfg.run.eta;
    j["iterations"] = cfg.run.iterations;
    j["seed"] = cfg.run.seed;
    j["algorithm"] = algorithm_name(cfg.run.algorithm);
    j["epsilon"] = cfg.run.epsilon;
    j["study_samples"] = cfg.study_samples;
    j["study_seed"] = cfg.study_seed;
    j["out_dir"] = cfg.out_dir;
    j["re_min"] = cfg.run.uncertainty.re_min;
    j["re_max"] = cfg.run.uncertainty.re_max;
    j["log_uniform_re"] = cfg.run.uncertainty.log_uniform_re;
    j["m_factors"] = cfg.catalog.m_factors;
    j["k_p"] = cfg.catalog.k_p;
    j["kappa"] = cfg.run.robust.kappa;
    j["c_l_star"] = cfg.run.robust.c_l_star;
    j["vol_tol"] = cfg.run.robust.vol_tol;
    j["n_per_surface"] = cfg.geometry.n_per_surface;
    j["nx"] = cfg.geometry.nx;
    j["ny"] = cfg.geometry.ny;
    j["margin_x"] = cfg.geometry.margin_x;
    j["margin_y"] = cfg.geometry.margin_y;
    j["n_quad"] = cfg.geometry.n_quad;
    j["dy_max"] = cfg.geometry.dy_max;
    j["alpha_min_deg"] = cfg.geometry.alpha_min_deg;
    j["alpha_max_deg"] = cfg.geometry.alpha_max_deg;
    return j.dump(2) + "\n";
}

CampaignConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str());
}

void save_design(const DesignVector& d, const GeometryContext& ctx,
                 const CampaignConfig& cfg, const std::string& path) {
    const FfdLattice& lat = ctx.lattice();
    json j;
    j["ffd_dy"] = d.ffd_dy;
    j["alpha_deg"] = d.alpha_deg;
    j["lattice"] = {{"nx", lat.nx},
                    {"ny", lat.ny},
                    {"x_min", lat.x_min},
                    {"x_max", lat.x_max},
                    {"y_min", lat.y_min},
                    {"y_max", lat.y_max},
                    {"locked_columns", lat.locked_columns}};
    j["mode"] = mode_name(cfg.run.mode);
    j["lambda"] = cfg.run.lambda;
    j["n"] = cfg.run.n;
    j["seed"] = cfg.run.seed;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_design: cannot open " + path);
    out << j.dump(2) << "\n";
}

DesignVector load_design(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_design: cannot open " + path);
    json j;
    try {
        in >> j;
        DesignVector d;
        d.ffd_dy = j.at("ffd_dy").get<std::vector<double>>();
        d.alpha_deg = j.at("alpha_deg").get<double>();
        return d;
    } catch (const json::exception& e) {
        throw std::runtime_error("load_design: bad design file " + path + ": " + e.what());
    }
}

RunResult run_campaign(const CampaignConfig& cfg_in) {
    CampaignConfig cfg = cfg_in;
    cfg.validate_and_normalize();
    std::filesystem::create_directories(cfg.out_dir);
    const GeometryContext ctx(cfg.geometry);
    const ModelCatalog catalog = model_catalog(cfg.catalog);

    const auto dir = std::filesystem::path(cfg.out_dir);
    {
        std::ofstream echo(dir / "config_echo.json");
        echo << config_to_json_text(cfg);
    }

    std::ofstream hist(dir / "history.csv");
    if (!hist) throw std::runtime_error("run_campaign: cannot open history.csv");
    hist << "iteration,normalized_cost,mean_cd,mean_cl,objective,"
            "g_lift_violation,g_vol_violation,alpha_deg\n";
    const auto writer = [&hist](const IterationRecord& r) {
        hist << r.k << ',' << format_g17(r.normalized_cost) << ','
             << format_g17(r.mean_cd) << ',' << format_g17(r.mean_cl) << ','
             << format_g17(r.objective) << ',' << format_g17(r.g_lift_violation) << ','
             << format_g17(r.g_vol_violation) << ',' << format_g17(r.alpha_deg) << '\n';
        hist.flush();
    };

    RunResult result = run_optimization(ctx, catalog, cfg.run, writer);
    save_design(result.final_design, ctx, cfg, (dir / "design.json").string());
    write_shape_dat(ctx.deform(result.final_design), (dir / "shape.dat").string());
    return result;
}

std::vector<StudyResult> parameter_space_study(
    const GeometryContext& ctx, const ModelCatalog& catalog,
    const std::vector<std::pair<std::string, DesignVector>>& designs,
    std::uint64_t study_seed, int m, const UncertaintyConfig& ucfg,
    const std::string& out_dir) {
    if (m < 2) throw std::invalid_argument("parameter_space_study: m must be >= 2");
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);

    // One common sample set shared by every design.
    std::vector<UncertainInput> xis(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        xis[static_cast<std::size_t>(i)] =
            sample_xi(study_seed, 0, static_cast<std::uint64_t>(i), ucfg);

    std::ofstream scatter(dir / "study.csv");
    if (!scatter) throw std::runtime_error("parameter_space_study: cannot open study.csv");
    scatter << "design_id,re_c,model_id,c_d,c_l\n";

    std::vector<StudyResult> results;
    for (const auto& [name, design] : designs) {
        StudyResult r;
        r.design_id = name;
        std::vector<AeroResponse> responses;
        try {
            responses = evaluate_batch(ctx, catalog, design, xis);
        } catch (const DegenerateGeometryError&) {
            r.degenerate = true;
            results.push_back(r);
            continue;
        }
        std::vector<double> cd(responses.size()), cl(responses.size());
        for (std::size_t i = 0; i < responses.size(); ++i) {
            cd[i] = responses[i].c_d;
            cl[i] = responses[i].c_l;
            scatter << name << ',' << format_g17(xis[i].re_c) << ',' << xis[i].model_id
                    << ',' << format_g17(cd[i]) << ',' << format_g17(cl[i]) << '\n';
        }
        const auto [ecd, vcd] = sample_mean_variance(cd);
        const auto [ecl, vcl] = sample_mean_variance(cl);
        r.e_cd = ecd;
        r.var_cd = vcd;
        r.cv_cd = std::sqrt(vcd) / std::abs(ecd);
        r.e_cl = ecl;
        r.var_cl = vcl;
        r.cv_cl = std::sqrt(vcl) / std::abs(ecl);
        r.lift_margin = ecl - std::sqrt(vcl);
        results.push_back(std::move(r));
    }

    std::ofstream summary(dir / "summary.csv");
    summary << "design_id,e_cd,var_cd,cv_cd,e_cl,var_cl,cv_cl,lift_margin,degenerate\n";
    for (const auto& r : results) {
        summary << r.design_id << ',' << format_g17(r.e_cd) << ',' << format_g17(r.var_cd)
                << ',' << format_g17(r.cv_cd) << ',' << format_g17(r.e_cl) << ','
                << format_g17(r.var_cl) << ',' << format_g17(r.cv_cl) << ','
                << format_g17(r.lift_margin) << ',' << (r.degenerate ? 1 : 0) << '\n';
    }
    return results;
}

std::vector<StudyResult> read_summary_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_summary_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("read_summary_csv: empty file " + path);
    std::vector<StudyResult> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 9)
            throw std::runtime_error("read_summary_csv: malformed row in " + path);
        StudyResult r;
        r.design_id = fields[0];
        r.e_cd = std::stod(fields[1]);
        r.var_cd = std::stod(fields[2]);
        r.cv_cd = std::stod(fields[3]);
        r.e_cl = std::stod(fields[4]);
        r.var_cl = std::stod(fields[5]);
        r.cv_cl = std::stod(fields[6]);
        r.lift_margin = std::stod(fields[7]);
        r.degenerate = fields[8] != "0";
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ComparisonRow> compare_designs(const std::vector<StudyResult>& results) {
    if (results.size() < 2)
        throw std::invalid_argument("compare_designs: need at least 2 study results");
    const StudyResult& base = results.front();
    std::vector<ComparisonRow> rows;
    rows.reserve(results.size());
    for (const auto& r : results) {
        ComparisonRow row;
        row.stats = r;
        row.r_e_cd = r.e_cd / base.e_cd;
        row.r_var_cd = r.var_cd / base.var_cd;
        row.r_cv_cd = r.cv_cd / base.cv_cd;
        row.r_e_cl = r.e_cl / base.e_cl;
        row.r_var_cl = r.var_cl / base.var_cl;
        row.r_cv_cl = r.cv_cl / base.cv_cl;
        row.r_lift_margin = r.lift_margin / base.lift_margin;
        rows.push_back(row);
    }
    return rows;
}

std::string comparison_text_table(const std::vector<ComparisonRow>& rows) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-12s %10s %10s %8s %10s %10s %8s %8s %8s\n",
                  "design", "E[CD]", "Var[CD]", "CV[CD]", "E[CL]", "Var[CL]", "CV[CL]",
                  "margin", "E[CD]/b");
    out << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf),
                      "%-12s %10.3e %10.3e %8.3f %10.3e %10.3e %8.3f %8.4f %8.3f\n",
                      r.stats.design_id.c_str(), r.stats.e_cd, r.stats.var_cd,
                      r.stats.cv_cd, r.stats.e_cl, r.stats.var_cl, r.stats.cv_cl,
                      r.stats.lift_margin, r.r_e_cd);
        out << buf;
    }
    return out.str();
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_comparison_csv: cannot open " + path);
    out << "design_id,e_cd,var_cd,cv_cd,e_cl,var_cl,cv_cl,lift_margin,"
           "ratio_e_cd,ratio_var_cd,ratio_cv_cd,ratio_e_cl,ratio_var_cl,"
           "ratio_cv_cl,ratio_lift_margin\n";
    for (const auto& r : rows) {
        out << r.stats.design_id << ',' << format_g17(r.stats.e_cd) << ','
            << format_g17(r.stats.var_cd) << ',' << format_g17(r.stats.cv_cd) << ','
            << format_g17(r.stats.e_cl) << ',' << format_g17(r.stats.var_cl) << ','
            << format_g17(r.stats.cv_cl) << ',' << format_g17(r.stats.lift_margin) << ','
            << format_g17(r.r_e_cd) << ',' << format_g17(r.r_var_cd) << ','
            << format_g17(r.r_cv_cd) << ',' << format_g17(r.r_e_cl) << ','
            << format_g17(r.r_var_cl) << ',' << format_g17(r.r_cv_cl) << ','
            << format_g17(r.r_lift_margin) << '\n';
    }
}

}  // namespace rdo
