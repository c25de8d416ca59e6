#ifndef MCTAIL_PARALLEL_HPP
#define MCTAIL_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mctail {

// Runs fn(i) for every i in [0, count) on `workers` threads (0 means
// hardware concurrency). Items are claimed through an atomic counter, so
// fn must write only to per-index state; results are then independent of
// the claim schedule. The first exception thrown by any worker is rethrown
// on the calling thread after all workers join.
inline void parallel_for_index(std::size_t count, unsigned workers,
                               const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (workers == 0) workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (workers > count) workers = static_cast<unsigned>(count);

  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto body = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mctail

#endif  // MCTAIL_PARALLEL_HPP
