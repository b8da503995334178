#include "rdo/batch.hpp"

#include <cstdlib>
#include <exception>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rdo {

int resolve_worker_count() {
#ifdef _OPENMP
    if (const char* env = std::getenv("RDO_NUM_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<AeroResponse> evaluate_batch_serial(const GeometryContext& ctx,
                                                const ModelCatalog& catalog,
                                                const DesignVector& design,
                                                const std::vector<UncertainInput>& xis) {
    std::vector<AeroResponse> out(xis.size());
    for (std::size_t i = 0; i < xis.size(); ++i)
        out[i] = evaluate(ctx, catalog, design, xis[i]);
    return out;
}

std::vector<AeroResponse> evaluate_batch(const GeometryContext& ctx,
                                         const ModelCatalog& catalog,
                                         const DesignVector& design,
                                         const std::vector<UncertainInput>& xis) {
#ifndef _OPENMP
    return evaluate_batch_serial(ctx, catalog, design, xis);
#else
    const int workers = resolve_worker_count();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(xis.size());
    if (workers <= 1 || n <= 1) return evaluate_batch_serial(ctx, catalog, design, xis);

    std::vector<AeroResponse> out(xis.size());
    std::exception_ptr error;
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] =
                evaluate(ctx, catalog, design, xis[static_cast<std::size_t>(i)]);
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
#endif
}

}  // namespace rdo
