#pragma once

#include <cstdint>
#include <functional>

namespace latsm {

/// Worker count: min(hardware_concurrency, LATTICE_SMOOTH_THREADS if set).
int worker_count();

/// Runs body(i) for i in [0, count) on the worker pool. The body must write
/// only to disjoint slots; iteration order is unspecified, so outputs must not
/// depend on it. Exceptions are collected and the first one rethrown.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& body);

} // namespace latsm
