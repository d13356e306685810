#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace wlab {

// Worker count: hardware concurrency capped by the WLAB_THREADS environment
// variable.  All parallel loops below merge per-chunk results in chunk order,
// so results are independent of the worker count.
inline unsigned thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("WLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) hw = std::min<long>(hw, v);
  }
  return hw;
}

// Runs fn(chunk_index, begin, end) over [0, n) split into contiguous chunks.
// Chunk boundaries depend only on n, never on the worker count.
inline void parallel_chunks(
    std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  unsigned workers = thread_budget();
  std::size_t n_chunks = std::min<std::size_t>(n, 64);
  std::size_t chunk = (n + n_chunks - 1) / n_chunks;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t b = 0; b < n; b += chunk) ranges.emplace_back(b, std::min(n, b + chunk));

  if (workers <= 1 || ranges.size() <= 1) {
    for (std::size_t c = 0; c < ranges.size(); ++c) fn(c, ranges[c].first, ranges[c].second);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t c = w; c < ranges.size(); c += workers)
        fn(c, ranges[c].first, ranges[c].second);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace wlab
