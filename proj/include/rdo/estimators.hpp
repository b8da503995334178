#pragma once

#include <utility>
#include <vector>

#include "rdo/aero.hpp"

namespace rdo {

struct RobustConfig {
    double lambda = 0.0;                     // robustness weight, shared
    std::array<double, 3> kappa{1.0, 1.0, 1.0};  // lift, volume-upper, volume-lower
    double c_l_star = 0.375;
    double vol_tol = 1e-3;
};

struct SampleBatch {
    DesignVector design;
    std::vector<std::pair<UncertainInput, AeroResponse>> entries;
    double area_ratio = 1.0;  // Omega/Omega0, deterministic for a design
};

SampleBatch make_batch(const GeometryContext& ctx, const DesignVector& design,
                       const std::vector<UncertainInput>& xis,
                       std::vector<AeroResponse> responses);

struct ConstraintValues {
    // g1: lift shortfall; g2/g3: volume equality as two one-sided bounds.
    std::array<double, 3> g;
    std::array<std::vector<double>, 3> grad;  // d g_j / d theta, length n_dv
};

ConstraintValues constraint_values(const GeometryContext& ctx,
                                   const AeroResponse& response, double area_ratio,
                                   const RobustConfig& cfg);

// G = max(0, g)^2 with gradient 2*max(0,g)*grad_g (continuous at g = 0).
std::pair<double, std::vector<double>> violation_transform(double g,
                                                           const std::vector<double>& grad_g);

// Unbiased sample variance ((n-1) denominator; 0 by convention for n = 1).
std::pair<double, double> sample_mean_variance(const std::vector<double>& values);

struct StochasticEstimate {
    double objective_value = 0.0;
    std::vector<double> gradient;
    double mean_cd = 0.0;
    double mean_cl = 0.0;
    double var_cd = 0.0;
    double mean_g_lift = 0.0;  // mean lift violation G1
    double g_vol = 0.0;        // volume violation G2 + G3 (deterministic)
};

// Robust objective estimate on one batch: mean + lambda * var of the drag
// coefficient and of each transformed constraint violation. The gradient is
// the exact derivative of the value on the frozen batch.
StochasticEstimate estimate(const GeometryContext& ctx, const SampleBatch& batch,
                            const RobustConfig& cfg);

}  // namespace rdo
