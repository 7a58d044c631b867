#include "blendkit/parallel.hpp"

#include <atomic>

namespace blendkit {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) { g_threads.store(std::max(1, n)); }

int thread_count() { return g_threads.load(); }

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 32;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace blendkit
