#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace twistlab::speclin {

// Process-wide worker count for row-parallel kernels and sweep jobs.
// 0 means "pick hardware concurrency, capped". The setting is read once per
// parallel_for call; changing it between calls is safe, changing it
// concurrently with a running kernel is not meaningful.
inline int& thread_count() {
  static int count = 0;
  return count;
}

inline int resolved_thread_count() {
  int c = thread_count();
  if (c > 0) return c;
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp<unsigned>(hw == 0 ? 1 : hw, 1, 8));
}

// Static block partition of [0, n). Each index is owned by exactly one
// worker, so results are bitwise deterministic for any fixed thread count
// (no shared accumulators, no reduction-order dependence).
template <class F>
void parallel_for(std::size_t n, F&& body, std::size_t grain = 4096) {
  int workers = resolved_thread_count();
  if (workers <= 1 || n <= grain) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::size_t blocks = static_cast<std::size_t>(workers);
  std::size_t chunk = (n + blocks - 1) / blocks;
  std::vector<std::thread> pool;
  pool.reserve(blocks);
  for (std::size_t t = 0; t < blocks; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace twistlab::speclin
