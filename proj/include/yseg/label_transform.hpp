#pragma once

#include <cstdint>
#include <vector>

#include "yseg/grid.hpp"

namespace yseg {

enum class ClassMode { three_class, four_class };

struct TransformConfig {
  /// Chebyshev radius of the touching neighbourhood.
  std::size_t k = 2;
  /// Radius of the Euclidean-ball structuring element used for gaps.
  std::size_t gap_radius = 3;
  ClassMode mode = ClassMode::four_class;

  void validate() const;
  std::size_t channels() const { return mode == ClassMode::four_class ? 4 : 3; }
};

/// Squared Euclidean distance from every element to the nearest element with
/// `feature[e] != 0`, computed over the grid only. Elements with no feature
/// in the grid get `kFarAway`.
inline constexpr std::int64_t kFarAway = std::int64_t{1} << 60;
std::vector<std::int64_t> squared_distance_transform(const GridShape& shape,
                                                     std::span<const std::uint8_t> feature);

/// Binary dilation of `mask` by a Euclidean ball of the given radius.
std::vector<std::uint8_t> dilate(const GridShape& shape, std::span<const std::uint8_t> mask,
                                 std::size_t radius);

/// closing([g > 0]) - [g > 0] with a Euclidean ball. The dilation treats the
/// outside as background; the erosion only looks at elements inside the grid.
BottomHatMap bottom_hat(const InstanceLabelMap& g, std::size_t radius);

/// Instance annotation to semantic ground truth, evaluated top-down per
/// element: background (g = 0, no bottom hat), gap (g = 0, bottom hat; four-
/// class mode only), touching (some other nonzero label within Chebyshev
/// distance k), otherwise cell.
SemanticLabelMap to_semantic(const InstanceLabelMap& g, const TransformConfig& cfg);

/// 1 where a foreground element sees a different nonzero label within
/// Chebyshev distance k.
std::vector<std::uint8_t> touching_mask(const InstanceLabelMap& g, std::size_t k);

}  // namespace yseg
