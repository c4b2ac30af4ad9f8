#include <doctest.h>

#include "yseg/label_transform.hpp"
#include "yseg/reference.hpp"
#include "yseg/rng.hpp"
#include "yseg/scene.hpp"

using namespace yseg;

namespace {

InstanceLabelMap row(std::vector<std::uint32_t> v) {
  const std::size_t n = v.size();
  return InstanceLabelMap(GridShape{1, n}, 1, std::move(v));
}

std::vector<std::uint8_t> classes(const SemanticLabelMap& h) { return {h.values().begin(), h.values().end()}; }

}  // namespace

TEST_SUITE("transform") {

TEST_CASE("bottom hat examples") {
  const auto bh = bottom_hat(row({1, 0, 2}), 1);
  CHECK(std::vector<std::uint8_t>(bh.values().begin(), bh.values().end()) == std::vector<std::uint8_t>{0, 1, 0});

  InstanceLabelMap empty(GridShape{6, 6}, 1, 0u);
  const auto be = bottom_hat(empty, 2);
  for (auto v : be.values()) CHECK(v == 0);

  InstanceLabelMap square(GridShape{30, 30}, 1, 0u);
  for (std::size_t y = 12; y < 18; ++y)
    for (std::size_t x = 12; x < 18; ++x) square[y * 30 + x] = 1;
  const auto bs = bottom_hat(square, 3);
  for (auto v : bs.values()) CHECK(v == 0);
}

TEST_CASE("semantic examples") {
  TransformConfig cfg;
  cfg.k = 2;
  cfg.gap_radius = 1;
  CHECK(classes(to_semantic(row({1, 1, 2, 2}), cfg)) == std::vector<std::uint8_t>{2, 2, 2, 2});
  CHECK(classes(to_semantic(row({1, 0, 2}), cfg)) == std::vector<std::uint8_t>{2, 3, 2});
  CHECK(classes(to_semantic(row({0, 0, 0}), cfg)) == std::vector<std::uint8_t>{0, 0, 0});
  cfg.mode = ClassMode::three_class;
  CHECK(classes(to_semantic(row({1, 0, 2}), cfg)) == std::vector<std::uint8_t>{2, 0, 2});
}

TEST_CASE("matches the brute-force reference and class invariants") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    SceneSpec spec;
    spec.kind = SceneKind::random_blobs;
    spec.seed = s;
    spec.dims = s % 4 == 3 ? std::vector<std::size_t>{14, 15, 16} : std::vector<std::size_t>{30, 33};
    spec.blob_count = 4;
    spec.radius_min = 2;
    spec.radius_max = 5;
    const auto g = generate_scene(spec);
    TransformConfig cfg;
    cfg.k = 1 + s % 3;
    cfg.gap_radius = 1 + s % 4;
    const auto h4 = to_semantic(g, cfg);
    CHECK(h4 == reference::to_semantic(g, cfg));
    CHECK(bottom_hat(g, cfg.gap_radius) == reference::bottom_hat(g, cfg.gap_radius));

    cfg.mode = ClassMode::three_class;
    const auto h3 = to_semantic(g, cfg);
    for (std::size_t e = 0; e < g.elements(); ++e) {
      if (h4[e] == cls::touching || h4[e] == cls::cell) REQUIRE(g[e] != 0);
      if (h4[e] == cls::gap || h4[e] == cls::background) REQUIRE(g[e] == 0);
      REQUIRE(h3[e] == (h4[e] == cls::gap ? cls::background : h4[e]));
    }
  }
}

TEST_CASE("border gaps are filled without inventing foreground") {
  // Two cells touching the top border with a one-wide slit between them.
  InstanceLabelMap g(GridShape{6, 7}, 1, 0u);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 3; ++x) g[y * 7 + x] = 1;
    for (std::size_t x = 4; x < 7; ++x) g[y * 7 + x] = 2;
  }
  const auto bh = bottom_hat(g, 1);
  CHECK(bh[0 * 7 + 3] == 1);
  CHECK(bh[2 * 7 + 3] == 1);
  CHECK(bh[5 * 7 + 3] == 0);
}

TEST_CASE("invalid configuration") {
  TransformConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(to_semantic(row({1, 0}), cfg), std::invalid_argument);
  CHECK_THROWS_AS(bottom_hat(row({1, 0}), 0), std::invalid_argument);
}

}
