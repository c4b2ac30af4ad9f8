#include "yseg/scene.hpp"

#include <stdexcept>
#include <string>

#include "yseg/rng.hpp"

namespace yseg {

SceneKind parse_scene_kind(std::string_view s) {
  if (s == "two-squares-notch") return SceneKind::two_squares_notch;
  if (s == "random-blobs") return SceneKind::random_blobs;
  throw std::invalid_argument("unknown scene kind '" + std::string(s) + "'");
}

std::string_view to_string(SceneKind k) {
  return k == SceneKind::two_squares_notch ? "two-squares-notch" : "random-blobs";
}

void SceneSpec::validate() const {
  const GridShape shape(dims);  // rank and extents
  if (kind == SceneKind::two_squares_notch) {
    if (side == 0) throw std::invalid_argument("scene: side must be positive");
    if (notch_width < 1) throw std::invalid_argument("scene: notch width must be >= 1");
    if (notch_width > side) throw std::invalid_argument("scene: notch width exceeds side");
    if (notch_length > side) throw std::invalid_argument("scene: notch length exceeds side");
    const auto e = shape.extents3();
    const bool fits = e[2] >= 2 * side && e[1] >= side && (shape.rank() == 2 || e[0] >= side);
    if (!fits)
      throw std::invalid_argument("scene: two squares of side " + std::to_string(side) +
                                  " do not fit in a " + shape.str() + " grid");
  } else {
    if (blob_count < 1) throw std::invalid_argument("scene: blob count must be >= 1");
    if (radius_min < 1 || radius_min > radius_max)
      throw std::invalid_argument("scene: need 1 <= radius_min <= radius_max");
    for (std::size_t d : dims)
      if (d < 2 * radius_max + 1)
        throw std::invalid_argument("scene: blobs of radius " + std::to_string(radius_max) +
                                    " do not fit in a " + shape.str() + " grid");
  }
}

namespace {

InstanceLabelMap two_squares(const SceneSpec& spec) {
  const GridShape shape(spec.dims);
  InstanceLabelMap g(shape, 1, 0u);
  const auto e = shape.extents3();
  const std::size_t s = spec.side;
  const std::size_t depth = shape.rank() == 3 ? s : 1;
  const std::size_t z0 = (e[0] - depth) / 2;
  const std::size_t y0 = (e[1] - s) / 2;
  const std::size_t x0 = (e[2] - 2 * s) / 2;
  for (std::size_t z = z0; z < z0 + depth; ++z)
    for (std::size_t y = y0; y < y0 + s; ++y)
      for (std::size_t x = x0; x < x0 + 2 * s; ++x) g[shape.index3(z, y, x)] = x < x0 + s ? 1u : 2u;

  const std::size_t shared = x0 + s;  // first column of square 2
  const std::size_t left = (spec.notch_width + 1) / 2;
  const std::size_t right = spec.notch_width / 2;
  for (std::size_t z = z0; z < z0 + depth; ++z)
    for (std::size_t y = y0; y < y0 + spec.notch_length; ++y)
      for (std::size_t x = shared - left; x < shared + right; ++x) g[shape.index3(z, y, x)] = 0u;
  return g;
}

InstanceLabelMap random_blobs(const SceneSpec& spec) {
  const GridShape shape(spec.dims);
  InstanceLabelMap g(shape, 1, 0u);
  const auto e = shape.extents3();
  const std::size_t rank = shape.rank();
  Rng rng(stream_seed(spec.seed, 0x5ce7e));
  const auto sep = static_cast<std::ptrdiff_t>(spec.min_separation);
  const std::size_t max_attempts = 5000 * spec.blob_count;

  std::size_t placed = 0;
  for (std::size_t attempt = 0; attempt < max_attempts && placed < spec.blob_count; ++attempt) {
    const std::size_t r = rng.uniform_int(spec.radius_min, spec.radius_max);
    std::array<std::size_t, 3> centre{0, 0, 0};
    for (std::size_t a = (rank == 3 ? 0 : 1); a < 3; ++a) centre[a] = rng.uniform_int(r, e[a] - 1 - r);
    const auto ball = ball_offsets(rank, r);

    bool clear = true;
    for (const auto& o : ball) {
      const std::array<std::size_t, 3> q{centre[0] + o[0], centre[1] + o[1], centre[2] + o[2]};
      const std::ptrdiff_t zr = rank == 3 ? sep : 0;
      for (std::ptrdiff_t dz = -zr; dz <= zr && clear; ++dz)
        for (std::ptrdiff_t dy = -sep; dy <= sep && clear; ++dy)
          for (std::ptrdiff_t dx = -sep; dx <= sep && clear; ++dx) {
            const std::ptrdiff_t idx = offset_index(e, q, {dz, dy, dx});
            if (idx >= 0 && g[static_cast<std::size_t>(idx)] != 0) clear = false;
          }
      if (!clear) break;
    }
    if (!clear) continue;

    ++placed;
    for (const auto& o : ball) {
      const std::ptrdiff_t idx = offset_index(e, centre, o);
      g[static_cast<std::size_t>(idx)] = static_cast<std::uint32_t>(placed);
    }
  }
  if (placed < spec.blob_count)
    throw std::invalid_argument("scene: could only place " + std::to_string(placed) + " of " +
                                std::to_string(spec.blob_count) + " blobs");
  return g;
}

}  // namespace

InstanceLabelMap generate_scene(const SceneSpec& spec) {
  spec.validate();
  return spec.kind == SceneKind::two_squares_notch ? two_squares(spec) : random_blobs(spec);
}

}  // namespace yseg
