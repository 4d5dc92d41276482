#pragma once

#include <cstddef>
#include <functional>

namespace qwalk {

/// Worker count: QWALK_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Callers
/// write results into pre-sized slots so output order stays deterministic.
/// The first exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace qwalk
