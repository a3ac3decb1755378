#pragma once
// qsep/parallel.hpp — replica-level worker pool. Jobs are indexed 0..count-1
// and each job writes only its own output slot, so results are ordered and
// byte-identical no matter how the scheduler interleaves workers. The
// QSEP_WORKERS environment variable caps the pool (1 disables threading).

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "qsep/errors.hpp"

namespace qsep {

/// Number of workers to use for `jobs` jobs: hardware concurrency, capped by
/// the job count, the explicit cap (if positive), and QSEP_WORKERS (if set).
inline int worker_count(int jobs, int cap = 0) {
  int w = int(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  if (cap > 0 && cap < w) w = cap;
  if (const char* env = std::getenv("QSEP_WORKERS")) {
    const int e = std::atoi(env);
    if (e >= 1 && e < w) w = e;
  }
  if (jobs < w) w = jobs;
  return w < 1 ? 1 : w;
}

/// Runs work(0..jobs-1) across the pool. Exceptions from workers are
/// captured and the first one rethrown on the caller after all threads end.
inline void parallel_for(int jobs, const std::function<void(int)>& work, int cap = 0) {
  if (jobs <= 0) return;
  const int workers = worker_count(jobs, cap);
  if (workers == 1) {
    for (int i = 0; i < jobs; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= jobs) return;
        try {
          work(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qsep
