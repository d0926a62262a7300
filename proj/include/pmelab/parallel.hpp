#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace pme {

/// Internal parallelism cap: PME_LAB_THREADS (0 or unset = auto).
inline int thread_cap() {
  const char* env = std::getenv("PME_LAB_THREADS");
  int v = 0;
  if (env) v = std::atoi(env);
  if (v <= 0) v = static_cast<int>(std::thread::hardware_concurrency());
  return v > 0 ? v : 1;
}

/// Index-parallel loop; results must be written to disjoint slots so the
/// outcome is deterministic regardless of scheduling.
template <class F>
void parallel_for(int n, F&& f) {
  const int nt = std::min(thread_cap(), n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace pme
