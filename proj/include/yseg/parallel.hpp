#pragma once

// Element-parallel loops and reductions whose results do not depend on the
// number of OpenMP threads. Reductions split the index range into fixed-size
// blocks, sum each block sequentially and then combine the block partials in
// block order, so the floating-point evaluation order is a function of `n`
// alone.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace yseg::parallel {

inline constexpr std::size_t kReduceBlock = 1024;

/// Caps the OpenMP team size; n <= 0 restores the runtime default.
void set_threads(int n);
int max_threads();

template <typename F>
void for_each(std::size_t n, F&& f) {
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
}

/// Sum of term(i) for i in [0, n).
template <typename F>
double blocked_sum(std::size_t n, F&& term) {
  const std::size_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = std::min(n, lo + kReduceBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

/// Vector-valued reduction. `accumulate(lo, hi, acc)` adds the contribution of
/// indices [lo, hi) into `acc` (length `out.size()`, zero-initialised).
template <typename F>
void blocked_accumulate(std::size_t n, std::span<double> out, F&& accumulate) {
  const std::size_t width = out.size();
  const std::size_t blocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(blocks * width, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
    const std::size_t hi = std::min(n, lo + kReduceBlock);
    accumulate(lo, hi, std::span<double>(partial.data() + static_cast<std::size_t>(b) * width, width));
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t w = 0; w < width; ++w) out[w] += partial[b * width + w];
}

}  // namespace yseg::parallel
