// SPDX-License-Identifier: Apache-2.0

#include "carleman/parallel.hpp"

#include <atomic>

namespace carleman {

namespace {
std::atomic<int> configured_threads{0};
}

void set_thread_count(int threads) { configured_threads = threads < 0 ? 0 : threads; }

int thread_count() {
  const int t = configured_threads.load();
  if (t > 0) return t;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace carleman
