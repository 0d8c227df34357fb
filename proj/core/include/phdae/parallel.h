#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace phdae {

/// Worker cap for parallel maps. Defaults to PHDAE_THREADS if set, otherwise
/// the hardware concurrency.
int MaxThreads();

/// Overrides the worker cap; values < 1 restore the default.
void SetMaxThreads(int threads);

namespace internal {
/// Set inside ParallelFor workers; nested maps then run serially.
inline thread_local bool in_parallel_region = false;
}  // namespace internal

/// Calls f(i) for i in [0, n) using static contiguous chunks. Each index is
/// visited exactly once, so results written to per-index slots do not depend
/// on the thread count. Nested calls from a worker run serially. The first exception thrown by a worker is rethrown.
template <typename F>
void ParallelFor(std::size_t n, F&& f, std::size_t grain = 16) {
  const std::size_t max_workers = static_cast<std::size_t>(MaxThreads());
  const std::size_t workers =
      std::min(max_workers, grain == 0 ? n : (n + grain - 1) / grain);
  if (workers <= 1 || internal::in_parallel_region) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      internal::in_parallel_region = true;
      try {
        for (std::size_t i = begin; i < end; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace phdae
