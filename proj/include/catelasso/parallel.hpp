#pragma once

#include <cstddef>
#include <functional>

namespace catelasso {

/// Worker count from CATE_BENCH_THREADS, else the number of logical cores.
std::size_t default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
/// runs exactly once; callers write results into pre-sized slots so the
/// outcome is independent of scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace catelasso
