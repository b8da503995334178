// Compares the serial reference batch evaluator against the OpenMP one and
// checks that both produce bit-identical results.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "rdo/batch.hpp"

namespace {

double elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

bool bitwise_equal(const std::vector<rdo::AeroResponse>& a,
                   const std::vector<rdo::AeroResponse>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::memcmp(&a[i].c_l, &b[i].c_l, sizeof(double)) != 0) return false;
        if (std::memcmp(&a[i].c_d, &b[i].c_d, sizeof(double)) != 0) return false;
        if (a[i].grad_c_d != b[i].grad_c_d || a[i].grad_c_l != b[i].grad_c_l) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 20000;
    const rdo::GeometryContext ctx;
    const rdo::ModelCatalog catalog = rdo::model_catalog();

    rdo::DesignVector design;
    design.ffd_dy.assign(static_cast<std::size_t>(ctx.n_free()), 0.0);
    for (int f = 0; f < ctx.n_free(); ++f)
        design.ffd_dy[static_cast<std::size_t>(f)] = 0.01 * ((f % 3) - 1);
    design.alpha_deg = 2.0;

    std::vector<rdo::UncertainInput> xis(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        xis[static_cast<std::size_t>(i)] = rdo::sample_xi(1234, 0, static_cast<std::uint64_t>(i));

    // Warm-up pass so first-touch costs do not skew the timings.
    (void)rdo::evaluate_batch(ctx, catalog, design, xis);

    auto t0 = std::chrono::steady_clock::now();
    const auto serial = rdo::evaluate_batch_serial(ctx, catalog, design, xis);
    const double t_serial = elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    const auto parallel = rdo::evaluate_batch(ctx, catalog, design, xis);
    const double t_parallel = elapsed_ms(t0);

    const bool identical = bitwise_equal(serial, parallel);
    std::printf("batch size:        %d\n", n);
    std::printf("workers:           %d\n", rdo::resolve_worker_count());
    std::printf("serial reference:  %.1f ms\n", t_serial);
    std::printf("openmp kernel:     %.1f ms\n", t_parallel);
    std::printf("speedup:           %.2fx\n", t_serial / t_parallel);
    std::printf("bit-identical:     %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
