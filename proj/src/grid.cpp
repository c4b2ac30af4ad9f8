#include "yseg/grid.hpp"

#include <algorithm>
#include <sstream>

#include "yseg/parallel.hpp"

namespace yseg {

GridShape::GridShape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.size() != 2 && dims_.size() != 3)
    throw std::invalid_argument("grid rank must be 2 or 3, got " + std::to_string(dims_.size()));
  for (std::size_t d : dims_)
    if (d == 0) throw std::invalid_argument("grid extents must be positive");
}

std::size_t GridShape::size() const {
  if (dims_.empty()) return 0;
  std::size_t n = 1;
  for (std::size_t d : dims_) n *= d;
  return n;
}

std::array<std::size_t, 3> GridShape::extents3() const {
  if (dims_.size() == 2) return {1, dims_[0], dims_[1]};
  if (dims_.size() == 3) return {dims_[0], dims_[1], dims_[2]};
  return {0, 0, 0};
}

std::array<std::size_t, 3> GridShape::coords3(std::size_t index) const {
  const auto e = extents3();
  const std::size_t x = index % e[2];
  const std::size_t y = (index / e[2]) % e[1];
  const std::size_t z = index / (e[2] * e[1]);
  return {z, y, x};
}

std::size_t GridShape::index3(std::size_t z, std::size_t y, std::size_t x) const {
  const auto e = extents3();
  return (z * e[1] + y) * e[2] + x;
}

std::string GridShape::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "x" : "") << dims_[i];
  return os.str();
}

std::uint32_t max_label(const InstanceLabelMap& g) {
  const auto v = g.values();
  return v.empty() ? 0u : *std::max_element(v.begin(), v.end());
}

std::vector<std::array<std::ptrdiff_t, 3>> ball_offsets(std::size_t rank, std::size_t radius) {
  const auto r = static_cast<std::ptrdiff_t>(radius);
  const std::ptrdiff_t zr = rank == 3 ? r : 0;
  std::vector<std::array<std::ptrdiff_t, 3>> out;
  for (std::ptrdiff_t dz = -zr; dz <= zr; ++dz)
    for (std::ptrdiff_t dy = -r; dy <= r; ++dy)
      for (std::ptrdiff_t dx = -r; dx <= r; ++dx)
        if (dz * dz + dy * dy + dx * dx <= r * r) out.push_back({dz, dy, dx});
  return out;
}

std::vector<std::array<std::ptrdiff_t, 3>> neighbour_offsets(std::size_t rank, bool full) {
  const std::ptrdiff_t zr = rank == 3 ? 1 : 0;
  std::vector<std::array<std::ptrdiff_t, 3>> out;
  for (std::ptrdiff_t dz = -zr; dz <= zr; ++dz)
    for (std::ptrdiff_t dy = -1; dy <= 1; ++dy)
      for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
        const int nonzero = (dz != 0) + (dy != 0) + (dx != 0);
        if (nonzero == 0) continue;
        if (!full && nonzero != 1) continue;
        out.push_back({dz, dy, dx});
      }
  return out;
}

namespace parallel {

void set_threads(int n) {
#ifdef _OPENMP
  static const int initial = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : initial);
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace parallel

}  // namespace yseg
