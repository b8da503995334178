#include <doctest.h>

#include <cmath>
#include <random>

#include "rdo/optimizer.hpp"

using namespace rdo;

namespace {

OptimizerState fresh_state(std::vector<double> theta, double eta) {
    OptimizerState s;
    s.theta = std::move(theta);
    s.a.assign(s.theta.size(), 0.0);
    s.eta = eta;
    return s;
}

}  // namespace

TEST_CASE("plain SGD update") {
    auto s = fresh_state({1.0, 1.0}, 0.1);
    sgd_step(s, {2.0, -4.0});
    CHECK(s.theta[0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(s.theta[1] == doctest::Approx(1.4).epsilon(1e-15));
    CHECK(s.k == 2);

    sgd_step(s, {0.0, 0.0});
    CHECK(s.theta[0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(s.theta[1] == doctest::Approx(1.4).epsilon(1e-15));
}

TEST_CASE("updates project exactly onto the box bound") {
    auto s = fresh_state({0.9}, 1.0);
    s.lower = {-1.0};
    s.upper = {0.5};
    sgd_step(s, {-5.0});
    CHECK(s.theta[0] == 0.5);
    sgd_step(s, {7.0});
    CHECK(s.theta[0] == -1.0);
    s.a = {0.0};
    adagrad_step(s, {-3.0});   // first AdaGrad step magnitude ~ eta, stays inside
    CHECK(s.theta[0] < 0.5);
    adagrad_step(s, {-1e9});
    CHECK(s.theta[0] == 0.5);  // overshoot lands exactly on the bound
}

TEST_CASE("AdaGrad two-step hand sequence") {
    auto s = fresh_state({0.0, 0.0}, 0.1);
    adagrad_step(s, {3.0, -4.0});
    CHECK(s.a[0] == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(s.a[1] == doctest::Approx(16.0).epsilon(1e-15));
    CHECK(std::abs(s.theta[0] - (-0.1 * 3.0 / (3.0 + 1e-4))) < 1e-12);
    CHECK(std::abs(s.theta[1] - (0.1 * 4.0 / (4.0 + 1e-4))) < 1e-12);

    adagrad_step(s, {3.0, -4.0});
    CHECK(s.a[0] == doctest::Approx(18.0).epsilon(1e-15));
    CHECK(s.a[1] == doctest::Approx(32.0).epsilon(1e-15));
}

TEST_CASE("AdaGrad first step has magnitude close to eta") {
    for (double h : {0.001, 0.5, 3.0, 1e4}) {
        auto s = fresh_state({0.0}, 0.05);
        adagrad_step(s, {h});
        CHECK(std::abs(s.theta[0]) == doctest::Approx(0.05 * h / (h + 1e-4)).epsilon(1e-12));
    }
}

TEST_CASE("zero gradient component leaves coordinate and accumulator alone") {
    auto s = fresh_state({0.4, 0.7}, 0.1);
    adagrad_step(s, {1.0, 0.0});
    CHECK(s.theta[1] == 0.7);
    CHECK(s.a[1] == 0.0);
}

TEST_CASE("accumulator is monotone under random gradients") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto s = fresh_state({0.0, 0.0, 0.0}, 0.01);
    std::vector<double> prev = s.a;
    for (int k = 0; k < 100; ++k) {
        adagrad_step(s, {u(gen), u(gen), u(gen)});
        for (std::size_t j = 0; j < s.a.size(); ++j) CHECK(s.a[j] >= prev[j]);
        prev = s.a;
    }
}

TEST_CASE("constant gradient gives shrinking AdaGrad steps") {
    auto s = fresh_state({0.0}, 0.1);
    double prev_theta = s.theta[0];
    double prev_step = 1e9;
    for (int k = 1; k <= 50; ++k) {
        adagrad_step(s, {2.5});
        const double step = std::abs(s.theta[0] - prev_theta);
        if (k >= 2) CHECK(step < prev_step);
        prev_step = step;
        prev_theta = s.theta[0];
    }
}

TEST_CASE("plain SGD contracts the quadratic exactly as (1 - eta)^k") {
    // f(theta) = 0.5 ||theta - t*||^2, gradient theta - t*.
    const std::vector<double> tstar{0.3, -0.2};
    const double eta = 0.1;
    auto s = fresh_state({1.0, 1.0}, eta);
    std::vector<double> ref{1.0, 1.0};
    for (int k = 1; k <= 60; ++k) {
        sgd_step(s, {s.theta[0] - tstar[0], s.theta[1] - tstar[1]});
        // Bitwise-identical arithmetic: theta <- theta - eta * (theta - t*).
        for (std::size_t j = 0; j < ref.size(); ++j) ref[j] = ref[j] - eta * (ref[j] - tstar[j]);
        CHECK(s.theta[0] == ref[0]);
        CHECK(s.theta[1] == ref[1]);
        // And the analytic contraction factor within roundoff.
        const double norm = std::hypot(s.theta[0] - tstar[0], s.theta[1] - tstar[1]);
        const double expect = std::pow(1.0 - eta, k) * std::hypot(1.0 - tstar[0], 1.0 - tstar[1]);
        CHECK(norm == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("AdaGrad solves the quadratic within the recorded budget") {
    const std::vector<double> tstar{0.3, -0.2};
    auto s = fresh_state({1.0, 1.0}, 0.1);
    int k_reached = -1;
    for (int k = 1; k <= 20000; ++k) {
        adagrad_step(s, {s.theta[0] - tstar[0], s.theta[1] - tstar[1]});
        if (std::hypot(s.theta[0] - tstar[0], s.theta[1] - tstar[1]) < 1e-3) {
            k_reached = k;
            break;
        }
    }
    REQUIRE(k_reached > 0);
    CHECK(k_reached <= 300);  // regression bound, see acceptance suite
}

TEST_CASE("non-finite gradients abort with the iteration index") {
    auto s = fresh_state({0.0}, 0.1);
    s.k = 17;
    CHECK_THROWS_AS(sgd_step(s, {std::nan("")}), NumericalAbortError);
    try {
        adagrad_step(s, {std::numeric_limits<double>::infinity()});
        FAIL("expected abort");
    } catch (const NumericalAbortError& e) {
        CHECK(e.iteration == 17);
    }
}

TEST_CASE("optimization loop: dsp bookkeeping and determinism") {
    const GeometryContext ctx;
    const ModelCatalog catalog = model_catalog();
    RunConfig cfg;
    cfg.mode = Mode::dsp;
    cfg.n = 1;
    cfg.lambda = 0.0;
    cfg.eta = 0.01;
    cfg.iterations = 25;
    cfg.seed = 7;

    const auto a = run_optimization(ctx, catalog, cfg);
    const auto b = run_optimization(ctx, catalog, cfg);
    REQUIRE(a.history.size() == 25);
    CHECK(a.evaluations == 25);
    double prev_cost = 0.0;
    for (const auto& rec : a.history) {
        CHECK(rec.normalized_cost == static_cast<double>(rec.k));  // n = 1
        CHECK(rec.normalized_cost > prev_cost);
        prev_cost = rec.normalized_cost;
    }
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].theta == b.history[i].theta);
        CHECK(a.history[i].objective == b.history[i].objective);
    }
    CHECK(a.final_design.flatten() == b.final_design.flatten());
}

TEST_CASE("optimization loop: robust mode cost accounting and progress") {
    const GeometryContext ctx;
    const ModelCatalog catalog = model_catalog();
    RunConfig cfg;
    cfg.mode = Mode::robust;
    cfg.n = 4;
    cfg.lambda = 10.0;
    cfg.eta = 0.01;
    cfg.iterations = 40;
    cfg.seed = 11;

    const auto r = run_optimization(ctx, catalog, cfg);
    CHECK(r.evaluations == 160);
    CHECK(r.history.back().normalized_cost == 160.0);
    // Starting infeasible in lift, the loop must raise alpha.
    CHECK(r.final_design.alpha_deg > 0.0);
    // Design stayed inside the box.
    for (double dy : r.final_design.ffd_dy) {
        CHECK(dy <= ctx.config().dy_max);
        CHECK(dy >= -ctx.config().dy_max);
    }
}
