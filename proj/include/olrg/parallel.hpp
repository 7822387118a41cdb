#pragma once

#include <atomic>
#include <cstdlib>
#include <string_view>
#include <thread>
#include <vector>

namespace olrg::util {

/// OLRG_THREADS overrides the worker count; OLRG_DETERMINISTIC=1 forces
/// serial execution (slot-writing keeps results identical either way).
inline int thread_count() {
  if (const char* det = std::getenv("OLRG_DETERMINISTIC");
      det && std::string_view(det) == "1")
    return 1;
  if (const char* env = std::getenv("OLRG_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(i) for i in [0, count). Callers must write results into
/// preallocated per-index slots so reductions stay order-independent.
template <class F>
void parallel_for(int count, F&& fn) {
  const int workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace olrg::util
