#include <limits>
#include <vector>

#include "yseg/label_transform.hpp"
#include "yseg/parallel.hpp"

namespace yseg {

namespace {

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher) along one line.
// Entries >= kFarAway are treated as "no feature".
void distance_line(std::int64_t* f, std::size_t n, std::size_t stride, std::vector<std::int64_t>& in,
                   std::vector<std::size_t>& v, std::vector<double>& z) {
  in.resize(n);
  v.resize(n);
  z.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) in[i] = f[i * stride];

  std::size_t first = 0;
  while (first < n && in[first] >= kFarAway) ++first;
  if (first == n) return;  // nothing to propagate

  auto meet = [&](std::size_t q, std::size_t p) {
    const double fq = static_cast<double>(in[q]) + static_cast<double>(q) * static_cast<double>(q);
    const double fp = static_cast<double>(in[p]) + static_cast<double>(p) * static_cast<double>(p);
    return (fq - fp) / (2.0 * static_cast<double>(q) - 2.0 * static_cast<double>(p));
  };

  std::size_t k = 0;
  v[0] = first;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (std::size_t q = first + 1; q < n; ++q) {
    if (in[q] >= kFarAway) continue;
    double s = meet(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = meet(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const auto d = static_cast<std::int64_t>(q) - static_cast<std::int64_t>(v[k]);
    f[q * stride] = d * d + in[v[k]];
  }
}

}  // namespace

std::vector<std::int64_t> squared_distance_transform(const GridShape& shape,
                                                     std::span<const std::uint8_t> feature) {
  const auto e = shape.extents3();
  std::vector<std::int64_t> d(shape.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = feature[i] ? 0 : kFarAway;

  const std::size_t plane = e[1] * e[2];
  // x lines
  parallel::for_each(e[0] * e[1], [&](std::size_t line) {
    thread_local std::vector<std::int64_t> in;
    thread_local std::vector<std::size_t> v;
    thread_local std::vector<double> z;
    distance_line(d.data() + line * e[2], e[2], 1, in, v, z);
  });
  // y lines
  parallel::for_each(e[0] * e[2], [&](std::size_t line) {
    thread_local std::vector<std::int64_t> in;
    thread_local std::vector<std::size_t> v;
    thread_local std::vector<double> z;
    const std::size_t zi = line / e[2], x = line % e[2];
    distance_line(d.data() + zi * plane + x, e[1], e[2], in, v, z);
  });
  if (shape.rank() == 3) {
    parallel::for_each(plane, [&](std::size_t line) {
      thread_local std::vector<std::int64_t> in;
      thread_local std::vector<std::size_t> v;
      thread_local std::vector<double> z;
      distance_line(d.data() + line, e[0], plane, in, v, z);
    });
  }
  return d;
}

std::vector<std::uint8_t> dilate(const GridShape& shape, std::span<const std::uint8_t> mask, std::size_t radius) {
  if (radius == 0) return {mask.begin(), mask.end()};
  const auto d = squared_distance_transform(shape, mask);
  const auto r2 = static_cast<std::int64_t>(radius * radius);
  std::vector<std::uint8_t> out(d.size());
  parallel::for_each(d.size(), [&](std::size_t i) { out[i] = d[i] <= r2 ? 1 : 0; });
  return out;
}

BottomHatMap bottom_hat(const InstanceLabelMap& g, std::size_t radius) {
  if (radius < 1) throw std::invalid_argument("bottom_hat: radius must be >= 1");
  const std::size_t n = g.elements();
  std::vector<std::uint8_t> fg(n);
  for (std::size_t i = 0; i < n; ++i) fg[i] = g[i] != 0;

  const auto grown = dilate(g.shape(), fg, radius);
  // Erosion of the dilated mask: an element survives when no in-grid element
  // outside the dilation lies within the ball.
  std::vector<std::uint8_t> outside(n);
  for (std::size_t i = 0; i < n; ++i) outside[i] = !grown[i];
  const auto d = squared_distance_transform(g.shape(), outside);
  const auto r2 = static_cast<std::int64_t>(radius * radius);

  BottomHatMap out(g.shape(), 1, 0);
  parallel::for_each(n, [&](std::size_t i) { out[i] = (d[i] > r2 && !fg[i]) ? 1 : 0; });
  return out;
}

}  // namespace yseg
