#include "rdo/aero.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rdo {

namespace {
std::atomic<std::uint64_t> g_eval_count{0};
}

double AeroModelVariant::cf(double re) const {
    const double l = std::log10(re);
    switch (id) {
        case 1: return 0.074 * std::pow(re, -0.2);              // Prandtl power law
        case 2: return 0.455 / std::pow(l, 2.58);               // Prandtl-Schlichting
        case 3: return 0.075 / ((l - 2.0) * (l - 2.0));         // ITTC-1957
        case 4: return 0.427 / std::pow(l - 0.407, 2.64);       // Schultz-Grunow
        case 5: return 0.0576 * std::pow(re, -0.2);             // 1/7-power-law variant
        default: throw std::invalid_argument("cf: unknown model id");
    }
}

ModelCatalog model_catalog(const CatalogConfig& cfg) {
    ModelCatalog cat;
    for (int i = 0; i < 5; ++i) {
        cat[static_cast<std::size_t>(i)] = AeroModelVariant{
            i + 1, cfg.m_factors[static_cast<std::size_t>(i)],
            cfg.k_p[static_cast<std::size_t>(i)]};
        if (cat[static_cast<std::size_t>(i)].m <= 0.0 ||
            cat[static_cast<std::size_t>(i)].k_p < 0.0)
            throw std::invalid_argument("model_catalog: require m > 0 and k_p >= 0");
    }
    return cat;
}

LiftResult lift_coefficient(const std::vector<double>& camber_slopes,
                            const std::vector<double>& theta_q, double alpha_deg,
                            const AeroModelVariant& variant) {
    if (camber_slopes.size() != theta_q.size())
        throw std::invalid_argument("lift_coefficient: slope/node size mismatch");
    const std::size_t nq = theta_q.size();
    const double two_pi_m = variant.m * 2.0 * std::numbers::pi;

    double alpha_l0 = 0.0;
    LiftResult r;
    r.d_cl_d_slope.resize(nq);
    for (std::size_t q = 0; q < nq; ++q) {
        const double w = std::cos(theta_q[q]) - 1.0;
        alpha_l0 -= camber_slopes[q] * w / static_cast<double>(nq);
        r.d_cl_d_slope[q] = two_pi_m * w / static_cast<double>(nq);
    }
    const double alpha_rad = alpha_deg * std::numbers::pi / 180.0;
    r.c_l = two_pi_m * (alpha_rad - alpha_l0);
    r.d_cl_d_alpha_deg = two_pi_m * std::numbers::pi / 180.0;
    return r;
}

DragResult drag_coefficient(double c_l, double t_over_c, double perimeter,
                            double re, const AeroModelVariant& variant) {
    if (re < 1e6 || re > 1e7)
        throw std::invalid_argument("drag_coefficient: Re outside [1e6, 1e7]");
    const double cf = variant.cf(re);
    const double tau = t_over_c;
    const double ff = 1.0 + 2.0 * tau + 60.0 * tau * tau * tau * tau;
    DragResult r;
    r.c_d = cf * ff * perimeter + variant.k_p * c_l * c_l;
    r.d_cd_d_cl = 2.0 * variant.k_p * c_l;
    r.d_cd_d_tau = cf * perimeter * (2.0 + 240.0 * tau * tau * tau);
    r.d_cd_d_perimeter = cf * ff;
    return r;
}

AeroResponse evaluate(const GeometryContext& ctx, const ModelCatalog& catalog,
                      const DesignVector& design, const UncertainInput& xi) {
    if (xi.model_id < 1 || xi.model_id > 5)
        throw std::invalid_argument("evaluate: model_id outside catalog");
    const AeroModelVariant& variant = catalog[static_cast<std::size_t>(xi.model_id - 1)];

    const AirfoilShape shape = ctx.deform(design);
    const auto slopes = ctx.camber_slopes(shape);
    const auto thick = ctx.max_thickness(shape);
    const LiftResult lift = lift_coefficient(slopes, ctx.quad_theta(), design.alpha_deg, variant);
    const DragResult drag =
        drag_coefficient(lift.c_l, thick.t_over_c, shape.perimeter, xi.re_c, variant);

    const int nf = ctx.n_free();
    const int nq = ctx.config().n_quad;
    const auto& slope_grad = ctx.slope_grad();
    const auto perim_grad = ctx.perimeter_grad(shape);
    const auto tau_grad = ctx.thickness_grad(shape);

    AeroResponse out;
    out.c_l = lift.c_l;
    out.c_d = drag.c_d;
    out.area = shape.area;
    out.grad_c_l.assign(static_cast<std::size_t>(nf) + 1, 0.0);
    out.grad_c_d.assign(static_cast<std::size_t>(nf) + 1, 0.0);
    for (int f = 0; f < nf; ++f) {
        double dcl = 0.0;
        for (int q = 0; q < nq; ++q)
            dcl += lift.d_cl_d_slope[static_cast<std::size_t>(q)] *
                   slope_grad[static_cast<std::size_t>(q) * static_cast<std::size_t>(nf) +
                              static_cast<std::size_t>(f)];
        out.grad_c_l[static_cast<std::size_t>(f)] = dcl;
        out.grad_c_d[static_cast<std::size_t>(f)] =
            drag.d_cd_d_tau * tau_grad[static_cast<std::size_t>(f)] +
            drag.d_cd_d_perimeter * perim_grad[static_cast<std::size_t>(f)] +
            drag.d_cd_d_cl * dcl;
    }
    out.grad_c_l.back() = lift.d_cl_d_alpha_deg;
    out.grad_c_d.back() = drag.d_cd_d_cl * lift.d_cl_d_alpha_deg;

    g_eval_count.fetch_add(1, std::memory_order_relaxed);
    return out;
}

std::uint64_t evaluation_count() { return g_eval_count.load(std::memory_order_relaxed); }

void reset_evaluation_count() { g_eval_count.store(0, std::memory_order_relaxed); }

}  // namespace rdo
