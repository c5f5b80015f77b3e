// parallel.hpp: index-parallel loop over independent work items.
//
// FLUXONIUM_THREADS overrides the worker count; results must be written to
// per-index slots so that output order never depends on scheduling.

#pragma once

#include <cstddef>
#include <functional>

namespace fluxonium {

/// Worker count: FLUXONIUM_THREADS if set and positive, else hardware.
unsigned worker_count();

/// Calls body(i) for i in [0, n). The first exception thrown by any item is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fluxonium
