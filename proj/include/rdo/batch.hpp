#pragma once

#include <vector>

#include "rdo/aero.hpp"

namespace rdo {

// Worker count for parallel batch evaluation: RDO_NUM_THREADS if set,
// otherwise the OpenMP default. Always 1 when built without OpenMP.
int resolve_worker_count();

// Serial reference implementation: evaluates samples in index order.
std::vector<AeroResponse> evaluate_batch_serial(const GeometryContext& ctx,
                                                const ModelCatalog& catalog,
                                                const DesignVector& design,
                                                const std::vector<UncertainInput>& xis);

// OpenMP implementation. Each sample is written to its own slot, so the
// result is bit-identical to the serial reference for any worker count.
// Degenerate-geometry errors inside the parallel region are collected and
// rethrown after the loop.
std::vector<AeroResponse> evaluate_batch(const GeometryContext& ctx,
                                         const ModelCatalog& catalog,
                                         const DesignVector& design,
                                         const std::vector<UncertainInput>& xis);

}  // namespace rdo
