#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace attkit {

inline unsigned default_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, count) on up to n_threads workers. Tasks must be
/// independent and write to disjoint state. The first exception thrown by any
/// task is rethrown on the calling thread after all workers join.
inline void parallel_for(std::size_t count, unsigned n_threads,
                         const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (n_threads <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(n_threads, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};

  auto body = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        bool expected = false;
        if (failed.compare_exchange_strong(expected, true)) {
          first_error = std::current_exception();
        }
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace attkit
