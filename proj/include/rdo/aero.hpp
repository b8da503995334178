#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <vector>

#include "rdo/geometry.hpp"
#include "rdo/rng.hpp"

namespace rdo {

// One member of the discrete model family: a published turbulent
// skin-friction correlation plus lift-slope and lift-drag factors that give
// the family genuine model-form spread.
struct AeroModelVariant {
    int id = 0;                 // 1..5
    double m = 1.0;             // lift-slope factor
    double k_p = 0.0;           // coefficient of the c_l^2 drag term
    double cf(double re) const; // skin-friction correlation C_f(Re)
};

using ModelCatalog = std::array<AeroModelVariant, 5>;

struct CatalogConfig {
    std::array<double, 5> m_factors{1.000, 0.995, 1.005, 0.990, 1.010};
    std::array<double, 5> k_p{0.010, 0.055, 0.100, 0.145, 0.190};
};

ModelCatalog model_catalog(const CatalogConfig& cfg = {});

struct AeroResponse {
    double c_l = 0.0;
    double c_d = 0.0;
    std::vector<double> grad_c_l;  // d/d(theta), length n_dv
    std::vector<double> grad_c_d;
    double area = 0.0;             // of the deformed shape (xi-independent)
};

struct LiftResult {
    double c_l;
    double d_cl_d_alpha_deg;
    std::vector<double> d_cl_d_slope;  // per quadrature node
};

// Thin-airfoil lift: c_l = m * 2*pi * (alpha_rad - alpha_L0), with the
// zero-lift angle from midpoint quadrature over the camber slopes.
LiftResult lift_coefficient(const std::vector<double>& camber_slopes,
                            const std::vector<double>& theta_q, double alpha_deg,
                            const AeroModelVariant& variant);

struct DragResult {
    double c_d;
    double d_cd_d_cl;
    double d_cd_d_tau;  // tau = t/c
    double d_cd_d_perimeter;
};

// c_d = C_f(Re) * FF(t/c) * perimeter + k_p * c_l^2, FF = 1 + 2 tau + 60 tau^4.
DragResult drag_coefficient(double c_l, double t_over_c, double perimeter,
                            double re, const AeroModelVariant& variant);

// Full forward + sensitivity evaluation at one (design, realization) pair.
// Deterministic: identical inputs give bit-identical outputs.
AeroResponse evaluate(const GeometryContext& ctx, const ModelCatalog& catalog,
                      const DesignVector& design, const UncertainInput& xi);

// Running count of surrogate evaluations (cost bookkeeping).
std::uint64_t evaluation_count();
void reset_evaluation_count();

}  // namespace rdo
