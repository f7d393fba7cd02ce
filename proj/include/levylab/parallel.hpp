#pragma once

#include <cstddef>
#include <functional>

namespace levylab {

/// Worker count: hardware concurrency, capped by LEVYLAB_THREADS when set.
unsigned thread_count();

/// Runs body(i) for i in [0, n) over contiguous blocks on up to
/// thread_count() threads. Each index is visited exactly once, so writes to
/// per-index slots give results independent of the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace levylab
