#pragma once

#include <cstddef>
#include <functional>

namespace qreach {

/// Worker count: QUBIT_REACH_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Calls fn(i) for i in [0, n) across thread_count() workers. Work is split
/// into contiguous blocks; the first exception thrown by any call is rethrown
/// after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qreach
