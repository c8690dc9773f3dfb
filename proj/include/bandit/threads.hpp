#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bandit {

// Global worker count. 0 means auto: BANDIT_MINIMAX_THREADS if set, else
// hardware concurrency.
inline int& thread_count_setting() {
  static int n = 0;
  return n;
}

inline void set_thread_count(int n) { thread_count_setting() = n; }

inline int resolved_thread_count() {
  int n = thread_count_setting();
  if (n <= 0) {
    if (const char* env = std::getenv("BANDIT_MINIMAX_THREADS")) {
      n = std::atoi(env);
    }
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

// Runs fn(i) for i in [0, n), split into contiguous blocks, one per worker.
// fn must only write to per-i slots; determinism comes from the fixed
// partition, not from scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(resolved_thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::mutex err_mu;
  std::exception_ptr err;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn, &err_mu, &err] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace bandit
