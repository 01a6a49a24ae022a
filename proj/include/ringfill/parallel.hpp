/*! @file parallel.hpp
 *  @brief Tiny index-parallel loop with an environment-controlled thread cap.
 */

#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ringfill {

//! Worker cap: RINGFILL_THREADS if set to a positive number, otherwise the
//! hardware count (0 or anything unparsable also means auto).
inline unsigned thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const char* env = std::getenv("RINGFILL_THREADS");
  if (env == nullptr) return hw;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (end == env || *end != '\0' || v == 0) return hw;
  return static_cast<unsigned>(v);
}

namespace detail {
inline thread_local int parallel_depth = 0;
}

//! Runs body(i) for i in [0, n). Iterations are claimed from a shared counter,
//! so bodies must be independent; nested calls degrade to the serial loop.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  const unsigned budget = thread_budget();
  if (n <= 1 || budget <= 1 || detail::parallel_depth > 0) {
    ++detail::parallel_depth;
    try {
      for (std::size_t i = 0; i < n; ++i) body(i);
    } catch (...) {
      --detail::parallel_depth;
      throw;
    }
    --detail::parallel_depth;
    return;
  }

  const std::size_t workers = budget < n ? budget : n;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_guard;

  auto run = [&] {
    ++detail::parallel_depth;
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_guard);
        if (!failure) failure = std::current_exception();
      }
    }
    --detail::parallel_depth;
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace ringfill
