#pragma once

// Internal helpers: static-partition parallel loop and deterministic
// pairwise summation.

#include <algorithm>
#include <cstddef>
#include <span>
#include <thread>
#include <vector>

namespace fiseis::detail {

// Calls body(begin, end) on disjoint contiguous chunks. Results written by
// index are independent of the thread count.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_chunk = 4096) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, std::max<std::size_t>(1, n / min_chunk));
  if (workers <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = std::min(n, w * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    threads.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(std::size_t{0}, std::min(n, chunk));
  for (auto& t : threads) t.join();
}

inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 32) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

}  // namespace fiseis::detail
