#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace graphann {

// 0 resolves to the hardware thread count (at least 1).
size_t resolve_workers(size_t workers);

namespace detail {

// Grain size is a function of n only, never of the worker count, so code
// that keys per-grain state off the grain index stays reproducible.
inline size_t grain_size(size_t n) {
  size_t g = n / 256;
  if (g < 1) g = 1;
  if (g > 8192) g = 8192;
  return g;
}

}  // namespace detail

// Runs f(lo, hi, worker_id) over contiguous grains covering [0, n). Grains are
// handed out through a shared cursor: any grain may run on any worker, so
// callers must only write state that is disjoint per index (or per worker via
// worker_id < workers). The first exception is rethrown after all threads join.
template <typename F>
void parallel_ranges(size_t n, size_t workers, F&& f) {
  if (n == 0) return;
  workers = resolve_workers(workers);
  if (workers > n) workers = n;
  const size_t grain = detail::grain_size(n);
  if (workers <= 1 || n <= grain) {
    f(static_cast<size_t>(0), n, static_cast<size_t>(0));
    return;
  }

  std::atomic<size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::atomic<bool> error_claimed{false};

  auto run = [&](size_t worker_id) {
    while (true) {
      size_t lo = cursor.fetch_add(grain, std::memory_order_relaxed);
      if (lo >= n || failed.load(std::memory_order_relaxed)) break;
      size_t hi = lo + grain < n ? lo + grain : n;
      try {
        f(lo, hi, worker_id);
      } catch (...) {
        if (!error_claimed.exchange(true)) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (size_t w = 1; w < workers; w++) pool.emplace_back(run, w);
  run(0);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Runs f(i, worker_id) for every i in [0, n).
template <typename F>
void parallel_for(size_t n, size_t workers, F&& f) {
  parallel_ranges(n, workers, [&](size_t lo, size_t hi, size_t worker_id) {
    for (size_t i = lo; i < hi; i++) f(i, worker_id);
  });
}

}  // namespace graphann
