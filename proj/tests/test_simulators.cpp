#include <doctest.h>

#include <cmath>

#include "yseg/label_transform.hpp"
#include "yseg/parallel.hpp"
#include "yseg/scene.hpp"
#include "yseg/simulators.hpp"
#include "yseg/softmax.hpp"

using namespace yseg;

TEST_SUITE("simulators") {

TEST_CASE("imbalance sweep") {
  ImbalanceSimConfig cfg;
  cfg.pis = {0.01, 0.1, 0.5};
  cfg.trials = 200;
  cfg.seed = 42;
  const auto res = run_imbalance_sim(cfg);
  REQUIRE(res.trials.size() == 600);
  REQUIRE(res.summary.size() == 3);
  for (const auto& s : res.summary) {
    CHECK(std::abs(s.mean[0]) < 0.03);
    // C1 accuracy is pi^2 + (1 - pi)^2.
    CHECK(s.mean[5] == doctest::Approx(s.pi * s.pi + (1 - s.pi) * (1 - s.pi)).epsilon(0.02));
  }
  for (const auto& t : res.trials) CHECK(t.counts.total() == 1000);

  cfg.pis = {0.6};
  CHECK_THROWS_AS(run_imbalance_sim(cfg), std::invalid_argument);
  cfg.pis = {0.1};
  cfg.samples = 50;
  CHECK_THROWS_AS(run_imbalance_sim(cfg), std::invalid_argument);
}

TEST_CASE("imbalance sweep does not depend on thread count") {
  ImbalanceSimConfig cfg;
  cfg.pis = {0.01, 0.3};
  cfg.trials = 64;
  cfg.seed = 9;
  cfg.classifier = ClassifierKind::c3;
  parallel::set_threads(1);
  const auto a = run_imbalance_sim(cfg);
  parallel::set_threads(4);
  const auto b = run_imbalance_sim(cfg);
  parallel::set_threads(0);
  for (std::size_t i = 0; i < a.trials.size(); ++i) CHECK(a.trials[i].measures == b.trials[i].measures);
  CHECK(a.resampled == b.resampled);
  // At pi = 0.01 and N = 1000 an all-negative truth is rare but possible.
  CHECK(mcc_j_correlation(a).size() == 2);
}

TEST_CASE("correlation requires c3") {
  ImbalanceSimConfig cfg;
  cfg.pis = {0.5};
  cfg.trials = 10;
  CHECK_THROWS_AS(mcc_j_correlation(cfg), std::invalid_argument);
  const auto d = correlation_defaults();
  CHECK(d.classifier == ClassifierKind::c3);
}

TEST_CASE("shrinkwrap trajectory") {
  const ShrinkwrapConfig cfg;
  const auto res = run_shrinkwrap(cfg, PairWeights::uniform(4));
  REQUIRE(res.records.size() == cfg.resolved_iterations());
  CHECK(res.shrinkwrap_iteration == 48);
  CHECK(res.records.front().margin == 6);
  CHECK(res.records.at(48).margin == 0);
  CHECK(res.records.at(48).confidence == doctest::Approx(0.95));
  // The CE peak sits on the widest margin; within a plateau the rising
  // confidence still grows the gradient of the mislabelled ring a little.
  std::size_t peak_at = 0;
  for (const auto& r : res.records)
    if (r.grad_ce > res.records[peak_at].grad_ce) peak_at = r.iteration;
  CHECK(res.records[peak_at].margin == cfg.initial_margin);
  for (std::size_t t = cfg.iterations_per_margin; t <= res.shrinkwrap_iteration; t += cfg.iterations_per_margin)
    CHECK(res.records[t].grad_ce < res.records[t - 1].grad_ce);
  const auto& last = res.records.back();
  CHECK(last.ramp == 1.0);
  CHECK(last.grad_ce == 0.0);
  CHECK(last.grad_j == 0.0);
  CHECK(last.grad_jc == 0.0);

  ShrinkwrapConfig short_run;
  short_run.iterations = 10;
  CHECK_THROWS_AS(run_shrinkwrap(short_run, PairWeights::uniform(4)), std::invalid_argument);
}

TEST_CASE("shrinkwrap field") {
  const auto g = generate_scene(SceneSpec{});
  const auto h = to_semantic(g, TransformConfig{});
  const auto z = shrinkwrap_field(g, h, 4, 0, 0.7, 0.0);
  for (std::size_t e = 0; e < g.elements(); ++e) {
    const std::size_t pres = g[e] ? 1 : 0;
    REQUIRE(z.at(e, pres) == doctest::Approx(0.7));
    REQUIRE(z.at(e, (pres + 1) % 4) == doctest::Approx(0.1));
  }
  CHECK(shrinkwrap_field(g, h, 4, 2, 0.7, 1.0) == one_hot(h, 4));
}

TEST_CASE("landscape") {
  const auto y = one_hot(to_semantic(generate_scene(SceneSpec{}), TransformConfig{}), 4);
  LandscapeConfig cfg;
  cfg.resolution = 9;
  cfg.seed = 3;
  const auto theta = optimal_logits(y);
  const auto a = landscape_scan(cfg, y, theta, PairWeights::uniform(4));
  const std::size_t mid = 4;
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t k = 0; k < 9; ++k) {
      REQUIRE(!a.non_finite[i * 9 + k]);
      if (i != mid || k != mid) CHECK(a.at(i, k) > a.at(mid, mid));
    }
  CHECK(a.at(mid, mid) < 1e-2);
  const auto b = landscape_scan(cfg, y, theta, PairWeights::uniform(4));
  CHECK(a.values == b.values);
  cfg.resolution = 8;
  CHECK_THROWS_AS(landscape_scan(cfg, y, theta, PairWeights::uniform(4)), std::invalid_argument);
}

}
