// SPDX-License-Identifier: Apache-2.0

#ifndef CARLEMAN_PARALLEL_HPP
#define CARLEMAN_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace carleman {

/// Worker count used by the library; 0 selects hardware concurrency.
void set_thread_count(int threads);
int thread_count();

/// Calls f(i) for i in [0, n) on up to thread_count() threads with static
/// contiguous chunks. Callers write results by index, so the outcome does
/// not depend on the thread count. An exception from the lowest chunk is
/// rethrown.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, thread_count())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace carleman

#endif  // CARLEMAN_PARALLEL_HPP
