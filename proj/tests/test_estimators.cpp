#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>

#include "rdo/batch.hpp"
#include "rdo/estimators.hpp"

using namespace rdo;

namespace {

const GeometryContext& ctx() {
    static const GeometryContext c;
    return c;
}

const ModelCatalog& cat() {
    static const ModelCatalog c = model_catalog();
    return c;
}

SampleBatch batch_at(const DesignVector& d, const std::vector<UncertainInput>& xis) {
    return make_batch(ctx(), d, xis, evaluate_batch_serial(ctx(), cat(), d, xis));
}

DesignVector baseline_at(double alpha) {
    DesignVector d;
    d.ffd_dy.assign(static_cast<std::size_t>(ctx().n_free()), 0.0);
    d.alpha_deg = alpha;
    return d;
}

}  // namespace

TEST_CASE("constraint values at pinned points") {
    RobustConfig cfg;
    const auto d = baseline_at(0.0);
    auto r = evaluate(ctx(), cat(), d, dsp_input());

    r.c_l = cfg.c_l_star;
    auto cv = constraint_values(ctx(), r, 1.0, cfg);
    CHECK(cv.g[0] == 0.0);

    r.c_l = 0.40;
    cv = constraint_values(ctx(), r, 1.0, cfg);
    CHECK(cv.g[0] == doctest::Approx(-1.0 / 15.0).epsilon(1e-12));

    // Baseline volume: both one-sided constraints sit at -vol_tol.
    CHECK(cv.g[1] == doctest::Approx(-1e-3).epsilon(1e-12));
    CHECK(cv.g[2] == doctest::Approx(-1e-3).epsilon(1e-12));
}

TEST_CASE("violation transform") {
    const std::vector<double> grad{1.0, 0.0};

    auto [G, dG] = violation_transform(-0.5, grad);
    CHECK(G == 0.0);
    CHECK(dG[0] == 0.0);

    std::tie(G, dG) = violation_transform(0.2, grad);
    CHECK(G == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(dG[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(dG[1] == 0.0);

    std::tie(G, dG) = violation_transform(0.0, grad);
    CHECK(G == 0.0);
    CHECK(dG[0] == 0.0);

    // Continuity across the boundary.
    const double eps = 1e-9;
    CHECK(violation_transform(eps, grad).first < 1e-17);
}

TEST_CASE("sample mean and unbiased variance") {
    auto [m, v] = sample_mean_variance({1.0, 2.0, 3.0});
    CHECK(m == 2.0);
    CHECK(v == 1.0);

    std::tie(m, v) = sample_mean_variance({7.5, 7.5, 7.5});
    CHECK(m == 7.5);
    CHECK(v == 0.0);

    std::tie(m, v) = sample_mean_variance({5.0});
    CHECK(m == 5.0);
    CHECK(v == 0.0);  // n = 1 convention

    CHECK_THROWS_AS(sample_mean_variance({}), std::invalid_argument);
}

TEST_CASE("single sample with satisfied constraints reduces to the drag gradient") {
    RobustConfig cfg;
    cfg.lambda = 0.0;
    // High alpha: lift target met; baseline displacements: volume inside tol.
    const auto d = baseline_at(5.0);
    const auto b = batch_at(d, {dsp_input()});
    REQUIRE(b.entries.front().second.c_l > cfg.c_l_star);
    const auto est = estimate(ctx(), b, cfg);
    CHECK(est.gradient == b.entries.front().second.grad_c_d);
    CHECK(est.objective_value == b.entries.front().second.c_d);
}

TEST_CASE("lambda = 0 gradient is the average of per-sample gradients") {
    RobustConfig cfg;
    cfg.lambda = 0.0;
    const auto d = baseline_at(1.0);  // lift constraint active
    const auto xis = sample_batch(99, 1, 4);
    const auto b = batch_at(d, xis);
    const auto est = estimate(ctx(), b, cfg);

    std::vector<double> expected(static_cast<std::size_t>(ctx().n_dv()), 0.0);
    for (const auto& [xi, r] : b.entries) {
        const auto cv = constraint_values(ctx(), r, b.area_ratio, cfg);
        const auto [G1, dG1] = violation_transform(cv.g[0], cv.grad[0]);
        for (std::size_t j = 0; j < expected.size(); ++j)
            expected[j] += (r.grad_c_d[j] + dG1[j]) / 4.0;
    }
    for (std::size_t j = 0; j < expected.size(); ++j)
        CHECK(est.gradient[j] == doctest::Approx(expected[j]).epsilon(1e-12));
}

TEST_CASE("variance terms vanish exactly at lambda = 0") {
    RobustConfig with;
    with.lambda = 0.0;
    const auto d = baseline_at(1.0);
    const auto xis = sample_batch(5, 3, 4);
    const auto b = batch_at(d, xis);
    const auto est = estimate(ctx(), b, with);
    // Value must equal mean(f) + mean(G1) + G2 + G3 with no variance share.
    std::vector<double> f, G1;
    for (const auto& [xi, r] : b.entries) {
        f.push_back(r.c_d);
        const auto cv = constraint_values(ctx(), r, b.area_ratio, with);
        G1.push_back(violation_transform(cv.g[0], cv.grad[0]).first);
    }
    const double expect = sample_mean_variance(f).first + sample_mean_variance(G1).first;
    CHECK(est.objective_value == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("frozen-batch gradient is the exact derivative of the value") {
    RobustConfig cfg;
    cfg.lambda = 10.0;
    std::mt19937 gen(61);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    DesignVector d = baseline_at(1.5);
    for (auto& v : d.ffd_dy) v = u(gen);

    const auto xis = sample_batch(17, 2, 4);
    const auto est = estimate(ctx(), batch_at(d, xis), cfg);

    const auto theta = d.flatten();
    const double h = 1e-6;
    for (int j = 0; j < ctx().n_dv(); ++j) {
        auto tp = theta, tm = theta;
        tp[static_cast<std::size_t>(j)] += h;
        tm[static_cast<std::size_t>(j)] -= h;
        const double vp =
            estimate(ctx(), batch_at(DesignVector::from_flat(tp), xis), cfg).objective_value;
        const double vm =
            estimate(ctx(), batch_at(DesignVector::from_flat(tm), xis), cfg).objective_value;
        const double fd = (vp - vm) / (2.0 * h);
        const double an = est.gradient[static_cast<std::size_t>(j)];
        CHECK(std::abs(an - fd) <= 1e-5 * std::max(std::abs(an), std::abs(fd)) + 1e-9);
    }
}

TEST_CASE("non-finite responses are rejected with the sample index") {
    RobustConfig cfg;
    const auto d = baseline_at(1.0);
    auto b = batch_at(d, sample_batch(3, 1, 3));
    b.entries[1].second.c_d = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(estimate(ctx(), b, cfg),
                         "estimate: non-finite response at sample 1", std::runtime_error);
}

TEST_CASE("volume constraints react to actual volume change") {
    RobustConfig cfg;
    // Thicken the airfoil: area grows past the tolerance band, so the upper
    // one-sided constraint activates and pushes back through its gradient.
    DesignVector d = baseline_at(5.0);
    const int ny = ctx().config().ny;
    for (int col = 0; col < ctx().config().nx - 2; ++col) {
        d.ffd_dy[static_cast<std::size_t>(col * ny)] = -0.01;          // bottom row down
        d.ffd_dy[static_cast<std::size_t>(col * ny + ny - 1)] = 0.01;  // top row up
    }
    const auto b = batch_at(d, {dsp_input()});
    CHECK(b.area_ratio > 1.0 + cfg.vol_tol);
    const auto est = estimate(ctx(), b, cfg);
    CHECK(est.g_vol > 0.0);
}
