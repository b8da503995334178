#include "rdo/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rdo {

namespace {

bool finite(const AeroResponse& r) {
    if (!std::isfinite(r.c_l) || !std::isfinite(r.c_d) || !std::isfinite(r.area))
        return false;
    for (double v : r.grad_c_l)
        if (!std::isfinite(v)) return false;
    for (double v : r.grad_c_d)
        if (!std::isfinite(v)) return false;
    return true;
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

SampleBatch make_batch(const GeometryContext& ctx, const DesignVector& design,
                       const std::vector<UncertainInput>& xis,
                       std::vector<AeroResponse> responses) {
    if (xis.size() != responses.size() || xis.empty())
        throw std::invalid_argument("make_batch: need one response per sample");
    SampleBatch b;
    b.design = design;
    b.area_ratio = responses.front().area / ctx.area0();
    b.entries.reserve(xis.size());
    for (std::size_t i = 0; i < xis.size(); ++i)
        b.entries.emplace_back(xis[i], std::move(responses[i]));
    return b;
}

ConstraintValues constraint_values(const GeometryContext& ctx,
                                   const AeroResponse& response, double area_ratio,
                                   const RobustConfig& cfg) {
    const std::size_t nd = response.grad_c_l.size();
    ConstraintValues cv;
    cv.g[0] = (cfg.c_l_star - response.c_l) / cfg.c_l_star;
    cv.grad[0].resize(nd);
    for (std::size_t i = 0; i < nd; ++i)
        cv.grad[0][i] = -response.grad_c_l[i] / cfg.c_l_star;

    cv.g[1] = (area_ratio - 1.0) - cfg.vol_tol;
    cv.g[2] = (1.0 - area_ratio) - cfg.vol_tol;
    cv.grad[1].assign(nd, 0.0);
    cv.grad[2].assign(nd, 0.0);
    const auto& ag = ctx.area_grad();
    for (std::size_t f = 0; f < ag.size(); ++f) {
        const double d = ag[f] / ctx.area0();
        cv.grad[1][f] = d;
        cv.grad[2][f] = -d;
    }
    return cv;
}

std::pair<double, std::vector<double>> violation_transform(
    double g, const std::vector<double>& grad_g) {
    const double gp = std::max(0.0, g);
    std::vector<double> grad(grad_g.size());
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = 2.0 * gp * grad_g[i];
    return {gp * gp, std::move(grad)};
}

std::pair<double, double> sample_mean_variance(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("sample_mean_variance: empty input");
    const std::size_t n = values.size();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    if (n == 1) return {mean, 0.0};
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    return {mean, var};
}

namespace {

// Mean + lambda * var of one scalar statistic over the batch, with the exact
// frozen-batch gradient: d var = (2/(n-1)) sum (v_i - mean)(grad_i - grad_mean).
struct MeanVarTerm {
    double value;
    std::vector<double> gradient;
};

MeanVarTerm mean_var_term(const std::vector<double>& vals,
                          const std::vector<std::vector<double>>& grads, double lambda,
                          std::size_t nd) {
    const std::size_t n = vals.size();
    const auto [mean, var] = sample_mean_variance(vals);
    std::vector<double> gmean(nd, 0.0);
    for (const auto& g : grads) axpy(1.0 / static_cast<double>(n), g, gmean);

    MeanVarTerm t{mean + lambda * var, gmean};
    if (lambda != 0.0 && n >= 2) {
        const double c = 2.0 / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = lambda * c * (vals[i] - mean);
            for (std::size_t j = 0; j < nd; ++j)
                t.gradient[j] += w * (grads[i][j] - gmean[j]);
        }
    }
    return t;
}

}  // namespace

StochasticEstimate estimate(const GeometryContext& ctx, const SampleBatch& batch,
                            const RobustConfig& cfg) {
    const std::size_t n = batch.entries.size();
    if (n == 0) throw std::invalid_argument("estimate: empty batch");
    const std::size_t nd = batch.entries.front().second.grad_c_d.size();

    std::vector<double> f(n), g1v(n), cl(n);
    std::vector<std::vector<double>> gf(n), gG1(n);
    for (std::size_t i = 0; i < n; ++i) {
        const AeroResponse& r = batch.entries[i].second;
        if (!finite(r))
            throw std::runtime_error("estimate: non-finite response at sample " +
                                     std::to_string(i));
        f[i] = r.c_d;
        cl[i] = r.c_l;
        gf[i] = r.grad_c_d;
        const auto cv = constraint_values(ctx, r, batch.area_ratio, cfg);
        auto [G1, gradG1] = violation_transform(cv.g[0], cv.grad[0]);
        g1v[i] = G1;
        gG1[i] = std::move(gradG1);
    }

    // Volume constraints are xi-independent: mean(G) = G, var(G) = 0.
    const auto cv0 =
        constraint_values(ctx, batch.entries.front().second, batch.area_ratio, cfg);
    auto [G2, gG2] = violation_transform(cv0.g[1], cv0.grad[1]);
    auto [G3, gG3] = violation_transform(cv0.g[2], cv0.grad[2]);

    const MeanVarTerm tf = mean_var_term(f, gf, cfg.lambda, nd);
    const MeanVarTerm t1 = mean_var_term(g1v, gG1, cfg.lambda, nd);

    StochasticEstimate e;
    e.objective_value = tf.value + cfg.kappa[0] * t1.value + cfg.kappa[1] * G2 +
                        cfg.kappa[2] * G3;
    e.gradient = tf.gradient;
    axpy(cfg.kappa[0], t1.gradient, e.gradient);
    axpy(cfg.kappa[1], gG2, e.gradient);
    axpy(cfg.kappa[2], gG3, e.gradient);

    auto [fm, fv] = sample_mean_variance(f);
    e.mean_cd = fm;
    e.var_cd = fv;
    e.mean_cl = sample_mean_variance(cl).first;
    e.mean_g_lift = sample_mean_variance(g1v).first;
    e.g_vol = G2 + G3;
    return e;
}

}  // namespace rdo
