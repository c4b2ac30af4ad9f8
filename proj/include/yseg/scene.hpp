#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "yseg/grid.hpp"

namespace yseg {

enum class SceneKind { two_squares_notch, random_blobs };

SceneKind parse_scene_kind(std::string_view s);
std::string_view to_string(SceneKind k);

/// Synthetic annotation geometry.
///
/// two-squares-notch: two side-`side` squares (cubes in 3D) placed next to each
/// other along the last axis and centred in the grid. Label 1 is on the left,
/// label 2 on the right. A slit `notch_width` elements wide and
/// `notch_length` elements long is carved into the shared side starting at
/// its low end along axis rank-2; odd widths take the extra column from
/// square 1. In 3D the slit spans the whole cube depth.
///
/// random-blobs: `blob_count` discs (spheres) with radii in
/// [radius_min, radius_max], fully inside the grid. Distinct blobs keep a
/// Chebyshev distance greater than `min_separation` between their elements
/// (0 allows blobs to touch).
struct SceneSpec {
  SceneKind kind = SceneKind::two_squares_notch;
  std::vector<std::size_t> dims{24, 32};
  std::size_t side = 8;
  std::size_t notch_width = 1;
  std::size_t notch_length = 4;
  std::size_t blob_count = 3;
  std::size_t radius_min = 3;
  std::size_t radius_max = 5;
  std::size_t min_separation = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

InstanceLabelMap generate_scene(const SceneSpec& spec);

}  // namespace yseg
