#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdo/estimators.hpp"

namespace rdo {

struct OptimizerState {
    std::vector<double> theta;
    std::vector<double> a;   // AdaGrad accumulator, non-decreasing
    int k = 1;               // iteration counter
    double eta = 0.02;
    double epsilon = 1e-8;
    // Box bounds applied by projection after each update; empty = unbounded.
    std::vector<double> lower;
    std::vector<double> upper;
};

// theta <- clamp(theta - eta * h)
void sgd_step(OptimizerState& state, const std::vector<double>& h);

// a_j += h_j^2; theta_j <- clamp(theta_j - eta * h_j / (sqrt(a_j) + sqrt(eps)))
void adagrad_step(OptimizerState& state, const std::vector<double>& h);

enum class Mode { dsp, average, robust };
enum class Algorithm { adagrad, sgd };

Mode parse_mode(const std::string& s);
std::string mode_name(Mode m);

struct RunConfig {
    Mode mode = Mode::robust;
    int n = 4;             // samples per iteration (1 for dsp)
    double lambda = 0.0;   // 0 for dsp/average
    double eta = 0.01;
    int iterations = 500;
    std::uint64_t seed = 0;
    Algorithm algorithm = Algorithm::adagrad;
    double epsilon = 1e-8;
    UncertaintyConfig uncertainty;
    RobustConfig robust;   // lambda here is kept in sync with `lambda`
};

struct IterationRecord {
    int k = 0;
    double normalized_cost = 0.0;
    double mean_cd = 0.0;
    double mean_cl = 0.0;
    double objective = 0.0;
    double g_lift_violation = 0.0;  // batch mean of G1
    double g_vol_violation = 0.0;   // G2 + G3
    double alpha_deg = 0.0;
    std::vector<double> theta;
};

struct RunResult {
    std::vector<IterationRecord> history;
    DesignVector final_design;
    std::uint64_t evaluations = 0;
};

class NumericalAbortError : public std::runtime_error {
public:
    NumericalAbortError(int iteration, const std::string& what)
        : std::runtime_error(what), iteration(iteration) {}
    int iteration;
};

// Outer loop: draw batch, evaluate (possibly in parallel), estimate, step.
// Deterministic for a fixed config and seed, independent of worker count.
// on_record, when set, is invoked after every iteration (incremental logging).
RunResult run_optimization(const GeometryContext& ctx, const ModelCatalog& catalog,
                           const RunConfig& cfg,
                           const std::function<void(const IterationRecord&)>& on_record = {});

}  // namespace rdo
