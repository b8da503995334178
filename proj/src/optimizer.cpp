#include "rdo/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "rdo/batch.hpp"

namespace rdo {

namespace {

void check_gradient(const OptimizerState& state, const std::vector<double>& h) {
    if (h.size() != state.theta.size())
        throw std::invalid_argument("step: gradient length mismatch");
    for (double v : h)
        if (!std::isfinite(v))
            throw NumericalAbortError(state.k, "non-finite gradient at iteration " +
                                                   std::to_string(state.k));
}

void project(OptimizerState& state) {
    if (state.lower.empty()) return;
    for (std::size_t j = 0; j < state.theta.size(); ++j)
        state.theta[j] = std::clamp(state.theta[j], state.lower[j], state.upper[j]);
}

}  // namespace

void sgd_step(OptimizerState& state, const std::vector<double>& h) {
    check_gradient(state, h);
    for (std::size_t j = 0; j < state.theta.size(); ++j)
        state.theta[j] -= state.eta * h[j];
    project(state);
    ++state.k;
}

void adagrad_step(OptimizerState& state, const std::vector<double>& h) {
    check_gradient(state, h);
    const double sqrt_eps = std::sqrt(state.epsilon);
    for (std::size_t j = 0; j < state.theta.size(); ++j) {
        state.a[j] += h[j] * h[j];
        state.theta[j] -= state.eta * h[j] / (std::sqrt(state.a[j]) + sqrt_eps);
    }
    project(state);
    ++state.k;
}

Mode parse_mode(const std::string& s) {
    if (s == "dsp") return Mode::dsp;
    if (s == "average") return Mode::average;
    if (s == "robust") return Mode::robust;
    throw std::invalid_argument("unknown mode: " + s);
}

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::dsp: return "dsp";
        case Mode::average: return "average";
        default: return "robust";
    }
}

RunResult run_optimization(const GeometryContext& ctx, const ModelCatalog& catalog,
                           const RunConfig& cfg,
                           const std::function<void(const IterationRecord&)>& on_record) {
    if (cfg.iterations < 1) throw std::invalid_argument("run: iterations must be >= 1");
    if (cfg.n < 1) throw std::invalid_argument("run: n must be >= 1");
    if (cfg.eta <= 0.0) throw std::invalid_argument("run: eta must be positive");

    const int nd = ctx.n_dv();
    OptimizerState state;
    state.theta.assign(static_cast<std::size_t>(nd), 0.0);  // baseline shape, alpha = 0
    state.a.assign(static_cast<std::size_t>(nd), 0.0);
    state.eta = cfg.eta;
    state.epsilon = cfg.epsilon;
    state.lower.assign(static_cast<std::size_t>(nd), -ctx.config().dy_max);
    state.upper.assign(static_cast<std::size_t>(nd), ctx.config().dy_max);
    state.lower.back() = ctx.config().alpha_min_deg;
    state.upper.back() = ctx.config().alpha_max_deg;

    RobustConfig rob = cfg.robust;
    rob.lambda = cfg.lambda;

    RunResult result;
    result.history.reserve(static_cast<std::size_t>(cfg.iterations));

    std::vector<double> theta_prev = state.theta;
    for (int k = 1; k <= cfg.iterations; ++k) {
        std::vector<UncertainInput> xis;
        if (cfg.mode == Mode::dsp)
            xis.assign(1, dsp_input());
        else
            xis = sample_batch(cfg.seed, static_cast<std::uint64_t>(k), cfg.n,
                               cfg.uncertainty);

        // Degenerate geometry: pull the design halfway back toward the
        // previous iterate and retry the same batch, at most 5 times.
        std::vector<AeroResponse> responses;
        DesignVector design;
        int retries = 0;
        for (;;) {
            design = DesignVector::from_flat(state.theta);
            try {
                responses = evaluate_batch(ctx, catalog, design, xis);
                break;
            } catch (const DegenerateGeometryError&) {
                if (++retries > 5)
                    throw NumericalAbortError(
                        k, "degenerate geometry persisted after 5 retries at iteration " +
                               std::to_string(k));
                for (std::size_t j = 0; j < state.theta.size(); ++j)
                    state.theta[j] = 0.5 * (state.theta[j] + theta_prev[j]);
            }
        }
        result.evaluations += xis.size();

        const SampleBatch batch = make_batch(ctx, design, xis, std::move(responses));
        const StochasticEstimate est = estimate(ctx, batch, rob);

        IterationRecord rec;
        rec.k = k;
        rec.normalized_cost = static_cast<double>(k) * static_cast<double>(xis.size());
        rec.mean_cd = est.mean_cd;
        rec.mean_cl = est.mean_cl;
        rec.objective = est.objective_value;
        rec.g_lift_violation = est.mean_g_lift;
        rec.g_vol_violation = est.g_vol;
        rec.alpha_deg = state.theta.back();
        rec.theta = state.theta;
        if (on_record) on_record(rec);
        result.history.push_back(std::move(rec));

        theta_prev = state.theta;
        if (cfg.algorithm == Algorithm::adagrad)
            adagrad_step(state, est.gradient);
        else
            sgd_step(state, est.gradient);
    }

    result.final_design = DesignVector::from_flat(state.theta);
    return result;
}

}  // namespace rdo
