#include <doctest.h>

#include <set>

#include "yseg/label_transform.hpp"
#include "yseg/metrics.hpp"
#include "yseg/postprocess.hpp"
#include "yseg/scene.hpp"
#include "yseg/softmax.hpp"

using namespace yseg;

namespace {

ProbabilityField one(std::vector<double> p) { return ProbabilityField(GridShape{1, 1}, 4, std::move(p)); }

SemanticLabelMap semantic(std::size_t h, std::size_t w, const char* rows) {
  SemanticLabelMap m(GridShape{h, w}, 1);
  for (std::size_t e = 0; e < h * w; ++e) m[e] = static_cast<std::uint8_t>(rows[e] - '0');
  return m;
}

}  // namespace

TEST_SUITE("postprocess") {

TEST_CASE("map decision and gap modes") {
  const auto z = one({0.2, 0.25, 0.15, 0.4});
  const auto h = map_decision(z);
  CHECK(h[0] == 3);
  PostprocessConfig cfg;
  CHECK(resolve_gaps(h, z, cfg)[0] == 1);
  cfg.gap_mode = GapMode::background;
  CHECK(resolve_gaps(h, z, cfg)[0] == 0);

  const auto z2 = one({0.5, 0.05, 0.05, 0.4});
  CHECK(resolve_gaps(map_decision(z2), z2, PostprocessConfig{})[0] == 0);

  CHECK(map_decision(one({0.5, 0.5, 0, 0}))[0] == 0);

  // Dubious: max - median over the first three classes below tau.
  cfg.gap_mode = GapMode::dubious_threshold;
  cfg.tau = 0.1;
  const auto close = one({0.2, 0.25, 0.15, 0.4});  // 0.25 - 0.2 = 0.05
  CHECK(resolve_gaps(map_decision(close), close, cfg)[0] == 1);
  const auto clear = one({0.05, 0.3, 0.04, 0.61});
  CHECK(resolve_gaps(map_decision(clear), clear, cfg)[0] == 0);
  cfg.tau = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("instances from a touching band") {
  // Two cell blobs split by a one-wide touching column.
  const auto h = semantic(3, 7,
                          "1112111"
                          "1112111"
                          "1112111");
  const auto g = to_instances(h, PostprocessConfig{});
  CHECK(g[0] == 1);
  CHECK(g[6] == 2);
  // Column 3 is equidistant; ties go to the lower label.
  for (std::size_t y = 0; y < 3; ++y) CHECK(g[y * 7 + 3] == 1);
  PostprocessConfig hi;
  hi.tie_break = TieBreak::higher_label;
  CHECK(to_instances(h, hi)[3] == 2);

  const auto wide = semantic(1, 8, "11222211");
  const auto gw = to_instances(wide, PostprocessConfig{});
  CHECK(std::vector<std::uint32_t>(gw.values().begin(), gw.values().end()) ==
        std::vector<std::uint32_t>{1, 1, 1, 1, 2, 2, 2, 2});

  const auto none = semantic(2, 3, "020002");
  const auto gn = to_instances(none, PostprocessConfig{});
  for (auto v : gn.values()) CHECK(v == 0);
}

TEST_CASE("connectivity") {
  const auto diag = semantic(2, 2, "1001");
  CHECK(max_label(to_instances(diag, PostprocessConfig{})) == 2);
  PostprocessConfig full;
  full.connectivity = Connectivity::full;
  CHECK(max_label(to_instances(diag, full)) == 1);
}

TEST_CASE("labels are contiguous and components never merge") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    SceneSpec spec;
    spec.kind = SceneKind::random_blobs;
    spec.dims = {36, 36};
    spec.blob_count = 5;
    spec.seed = s;
    const auto h = to_semantic(generate_scene(spec), TransformConfig{});
    SemanticLabelMap h3 = h;
    for (auto& v : h3.values())
      if (v == cls::gap) v = cls::background;
    const auto g = to_instances(h3, PostprocessConfig{});
    std::set<std::uint32_t> labels;
    for (auto v : g.values())
      if (v) labels.insert(v);
    if (!labels.empty()) {
      CHECK(*labels.begin() == 1);
      CHECK(*labels.rbegin() == labels.size());
    }
    for (std::size_t e = 0; e < g.elements(); ++e)
      if (h3[e] == cls::cell) REQUIRE(g[e] != 0);
  }
}

TEST_CASE("default scene round trip") {
  const auto g = generate_scene(SceneSpec{});
  const auto z = one_hot(to_semantic(g, TransformConfig{}), 4);
  const auto out = postprocess(z, PostprocessConfig{});
  CHECK(panoptic(g, out).at("pq") == 1.0);
  CHECK(postprocess(z, PostprocessConfig{}) == out);

  SceneSpec s3;
  s3.dims = {10, 12, 24};
  s3.side = 6;
  const auto g3 = generate_scene(s3);
  CHECK(panoptic(g3, postprocess(one_hot(to_semantic(g3, TransformConfig{}), 4), PostprocessConfig{})).at("pq") ==
        1.0);
}

}
