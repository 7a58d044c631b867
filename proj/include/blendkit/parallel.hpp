#pragma once

#include <algorithm>
#include <span>
#include <thread>
#include <vector>

namespace blendkit {

/// Worker count used by parallel_for. Defaults to 1. Values < 1 are clamped.
void set_thread_count(int n);
int thread_count();

/// Runs fn(i) for i in [begin, end). Iterations must write disjoint outputs;
/// results never depend on the thread count.
template <class Fn>
void parallel_for(int begin, int end, Fn&& fn) {
  const int n = end - begin;
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const int lo = begin + static_cast<int>(static_cast<long long>(n) * w / workers);
    const int hi = begin + static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
}

/// Fixed-order pairwise summation. The association tree depends only on the
/// length of the input.
double pairwise_sum(std::span<const double> values);

}  // namespace blendkit
