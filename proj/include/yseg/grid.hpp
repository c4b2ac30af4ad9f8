#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "yseg/error.hpp"

namespace yseg {

/// Extents of a 2D or 3D grid in C order (slowest axis first).
class GridShape {
 public:
  GridShape() = default;
  explicit GridShape(std::vector<std::size_t> dims);
  GridShape(std::initializer_list<std::size_t> dims)
      : GridShape(std::vector<std::size_t>(dims)) {}

  std::size_t rank() const { return dims_.size(); }
  std::size_t size() const;
  std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
  const std::vector<std::size_t>& dims() const { return dims_; }

  /// Extents padded to (z, y, x); a 2D grid has z extent 1.
  std::array<std::size_t, 3> extents3() const;
  std::array<std::size_t, 3> coords3(std::size_t index) const;
  std::size_t index3(std::size_t z, std::size_t y, std::size_t x) const;

  std::string str() const;
  bool operator==(const GridShape&) const = default;

 private:
  std::vector<std::size_t> dims_;
};

/// Dense channel-last grid. The tag keeps label maps and real fields from
/// being mixed up at call sites.
template <typename T, typename Tag>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(GridShape shape, std::size_t channels, T fill = T{})
      : shape_(std::move(shape)), channels_(channels), data_(shape_.size() * channels, fill) {
    if (channels_ == 0) throw std::invalid_argument("grid needs at least one channel");
  }
  Grid(GridShape shape, std::size_t channels, std::vector<T> values)
      : shape_(std::move(shape)), channels_(channels), data_(std::move(values)) {
    if (channels_ == 0) throw std::invalid_argument("grid needs at least one channel");
    if (data_.size() != shape_.size() * channels_)
      throw ShapeMismatch("grid payload has " + std::to_string(data_.size()) + " values, expected " +
                          std::to_string(shape_.size() * channels_));
  }

  const GridShape& shape() const { return shape_; }
  std::size_t channels() const { return channels_; }
  std::size_t elements() const { return shape_.size(); }

  std::span<const T> values() const { return data_; }
  std::span<T> values() { return data_; }

  T& operator[](std::size_t element) { return data_[element * channels_]; }
  const T& operator[](std::size_t element) const { return data_[element * channels_]; }
  T& at(std::size_t element, std::size_t channel) { return data_[element * channels_ + channel]; }
  const T& at(std::size_t element, std::size_t channel) const {
    return data_[element * channels_ + channel];
  }

  std::span<T> element(std::size_t e) { return {data_.data() + e * channels_, channels_}; }
  std::span<const T> element(std::size_t e) const {
    return {data_.data() + e * channels_, channels_};
  }

  bool operator==(const Grid&) const = default;

 private:
  GridShape shape_;
  std::size_t channels_ = 1;
  std::vector<T> data_;
};

struct InstanceTag {};
struct SemanticTag {};
struct ProbabilityTag {};
struct LogitTag {};
struct BottomHatTag {};

/// Instance annotation: 0 is background, 1..m are objects.
using InstanceLabelMap = Grid<std::uint32_t, InstanceTag>;
/// Per-element semantic class, see `SemanticClass`.
using SemanticLabelMap = Grid<std::uint8_t, SemanticTag>;
/// Per-element simplex vectors (also used for one-hot targets).
using ProbabilityField = Grid<double, ProbabilityTag>;
using LogitField = Grid<double, LogitTag>;
/// 1 where the closing of the foreground added an element, else 0.
using BottomHatMap = Grid<std::uint8_t, BottomHatTag>;

namespace cls {
inline constexpr std::uint8_t background = 0;
inline constexpr std::uint8_t cell = 1;
inline constexpr std::uint8_t touching = 2;
inline constexpr std::uint8_t gap = 3;
}  // namespace cls

std::uint32_t max_label(const InstanceLabelMap& g);

/// Integer offsets within Euclidean distance `radius` of the origin, restricted
/// to the axes of a grid of the given rank.
std::vector<std::array<std::ptrdiff_t, 3>> ball_offsets(std::size_t rank, std::size_t radius);

/// Face (2d) or full (3^d - 1) neighbourhood offsets, origin excluded.
std::vector<std::array<std::ptrdiff_t, 3>> neighbour_offsets(std::size_t rank, bool full);

/// Element index of `coords + offset`, or -1 when it falls outside the grid.
inline std::ptrdiff_t offset_index(const std::array<std::size_t, 3>& ext,
                                   const std::array<std::size_t, 3>& c,
                                   const std::array<std::ptrdiff_t, 3>& o) {
  const std::ptrdiff_t z = static_cast<std::ptrdiff_t>(c[0]) + o[0];
  const std::ptrdiff_t y = static_cast<std::ptrdiff_t>(c[1]) + o[1];
  const std::ptrdiff_t x = static_cast<std::ptrdiff_t>(c[2]) + o[2];
  if (z < 0 || y < 0 || x < 0) return -1;
  if (z >= static_cast<std::ptrdiff_t>(ext[0]) || y >= static_cast<std::ptrdiff_t>(ext[1]) ||
      x >= static_cast<std::ptrdiff_t>(ext[2]))
    return -1;
  return (z * static_cast<std::ptrdiff_t>(ext[1]) + y) * static_cast<std::ptrdiff_t>(ext[2]) + x;
}

}  // namespace yseg
