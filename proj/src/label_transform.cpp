#include "yseg/label_transform.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "yseg/parallel.hpp"

namespace yseg {

void TransformConfig::validate() const {
  if (k < 1) throw std::invalid_argument("transform: k must be >= 1");
  if (mode == ClassMode::four_class && gap_radius < 1)
    throw std::invalid_argument("transform: gap radius must be >= 1 in four-class mode");
}

namespace {

// Running min/max of nonzero labels over a window of half-width k along one
// axis; separable, so three passes give the (2k+1)^d Chebyshev window.
void window_pass(std::vector<std::uint32_t>& lo, std::vector<std::uint32_t>& hi, const GridShape& shape,
                 std::size_t axis, std::size_t k) {
  const auto e = shape.extents3();
  const std::size_t n = e[axis];
  if (n == 1) return;
  const std::size_t stride = axis == 2 ? 1 : axis == 1 ? e[2] : e[1] * e[2];
  const std::size_t lines = shape.size() / n;
  const auto src_lo = lo;
  const auto src_hi = hi;
  parallel::for_each(lines, [&](std::size_t line) {
    std::size_t base;
    if (axis == 2) {
      base = line * e[2];
    } else if (axis == 1) {
      base = (line / e[2]) * e[1] * e[2] + line % e[2];
    } else {
      base = line;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = i >= k ? i - k : 0;
      const std::size_t b = std::min(n - 1, i + k);
      std::uint32_t mn = std::numeric_limits<std::uint32_t>::max();
      std::uint32_t mx = 0;
      for (std::size_t j = a; j <= b; ++j) {
        mn = std::min(mn, src_lo[base + j * stride]);
        mx = std::max(mx, src_hi[base + j * stride]);
      }
      lo[base + i * stride] = mn;
      hi[base + i * stride] = mx;
    }
  });
}

}  // namespace

std::vector<std::uint8_t> touching_mask(const InstanceLabelMap& g, std::size_t k) {
  const std::size_t n = g.elements();
  std::vector<std::uint32_t> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = g[i] == 0 ? std::numeric_limits<std::uint32_t>::max() : g[i];
    hi[i] = g[i];
  }
  for (std::size_t axis = 0; axis < 3; ++axis) window_pass(lo, hi, g.shape(), axis, k);

  std::vector<std::uint8_t> out(n);
  parallel::for_each(n, [&](std::size_t i) {
    const std::uint32_t v = g[i];
    out[i] = v != 0 && (lo[i] < v || hi[i] > v);
  });
  return out;
}

SemanticLabelMap to_semantic(const InstanceLabelMap& g, const TransformConfig& cfg) {
  cfg.validate();
  const std::size_t n = g.elements();
  const auto touch = touching_mask(g, cfg.k);
  BottomHatMap gaps;
  const bool four = cfg.mode == ClassMode::four_class;
  if (four) gaps = bottom_hat(g, cfg.gap_radius);

  SemanticLabelMap h(g.shape(), 1, cls::background);
  parallel::for_each(n, [&](std::size_t i) {
    if (g[i] == 0) {
      h[i] = (four && gaps[i]) ? cls::gap : cls::background;
    } else {
      h[i] = touch[i] ? cls::touching : cls::cell;
    }
  });
  return h;
}

}  // namespace yseg
