#include <doctest.h>

#include "yseg/label_transform.hpp"
#include "yseg/losses.hpp"
#include "yseg/parallel.hpp"
#include "yseg/reference.hpp"
#include "yseg/rng.hpp"
#include "yseg/scene.hpp"
#include "yseg/softmax.hpp"

using namespace yseg;

TEST_SUITE("parallel") {

TEST_CASE("blocked sums are identical for every team size") {
  Rng rng(1);
  std::vector<double> v(100000);
  for (auto& x : v) x = rng.normal() * 1e6;
  double first = 0;
  for (int threads : {1, 2, 3, 8}) {
    parallel::set_threads(threads);
    const double s = parallel::blocked_sum(v.size(), [&](std::size_t i) { return v[i]; });
    if (threads == 1) first = s;
    CHECK(s == first);
  }
  parallel::set_threads(0);
}

TEST_CASE("kernels match the serial versions and are thread-count independent") {
  SceneSpec spec;
  spec.kind = SceneKind::random_blobs;
  spec.dims = {20, 40, 40};
  spec.blob_count = 6;
  spec.seed = 8;
  const auto g = generate_scene(spec);
  const TransformConfig tcfg;
  const auto h = to_semantic(g, tcfg);
  CHECK(h == reference::to_semantic(g, tcfg));

  LogitField theta(g.shape(), 4);
  Rng rng(3);
  for (auto& v : theta.values()) v = rng.normal();
  const auto target = Target::from_semantic(h, 4);
  const auto y = one_hot(h, 4);

  std::vector<LossValue> runs;
  for (int threads : {1, 2, 8}) {
    parallel::set_threads(threads);
    CHECK(to_semantic(g, tcfg) == h);
    const auto z = softmax(theta);
    const auto zr = reference::softmax(theta);
    for (std::size_t i = 0; i < z.values().size(); ++i) REQUIRE(z.values()[i] == doctest::Approx(zr.values()[i]));
    runs.push_back(evaluate_loss(LossId::jc, target, theta, PairWeights::uniform(4)));
    CHECK(runs.back().total == doctest::Approx(reference::loss_value(LossId::jc, y, z, PairWeights::uniform(4))));
  }
  parallel::set_threads(0);
  for (const auto& r : runs) {
    CHECK(r.total == runs[0].total);
    CHECK(*r.gradient == *runs[0].gradient);
  }
}

}
