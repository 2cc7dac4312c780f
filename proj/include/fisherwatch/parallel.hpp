#pragma once

#include <cstddef>
#include <functional>

namespace fisherwatch {

/// Worker count: FISHERWATCH_THREADS when set to a positive integer,
/// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t thread_count();

/// Runs fn(i) for i in [0, n) on up to thread_count() workers. Results must be
/// written to per-index slots by the caller. If any call throws, the exception
/// from the smallest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fisherwatch
