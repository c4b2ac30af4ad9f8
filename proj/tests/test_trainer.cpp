#include <doctest.h>

#include <cmath>

#include "yseg/label_transform.hpp"
#include "yseg/parallel.hpp"
#include "yseg/scene.hpp"
#include "yseg/softmax.hpp"
#include "yseg/trainer.hpp"

using namespace yseg;

namespace {

struct Setup {
  InstanceLabelMap g = generate_scene(SceneSpec{});
  ProbabilityField y = one_hot(to_semantic(g, TransformConfig{}), 4);
};

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("zero iterations gives the initial loss") {
  Setup s;
  TrainConfig cfg;
  cfg.iterations = 0;
  const auto t = train(s.g, s.y, cfg, PairWeights::uniform(4));
  REQUIRE(t.records.size() == 1);
  CHECK(t.records[0].components.at("ce") == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(t.records[0].pq.has_value());
}

TEST_CASE("loss decreases at the default step") {
  Setup s;
  for (auto id : {LossId::ce, LossId::jc, LossId::bwm, LossId::dsc}) {
    for (auto init : {TrainInit::zeros, TrainInit::shrinkwrap}) {
      TrainConfig cfg;
      cfg.loss = id;
      cfg.init = init;
      cfg.iterations = 300;
      const auto t = train(s.g, s.y, cfg, PairWeights::uniform(4));
      for (std::size_t i = 1; i < t.records.size(); ++i)
        REQUIRE(t.records[i].total <= t.records[i - 1].total + 1e-12);
    }
  }
}

TEST_CASE("traces are thread-count independent") {
  Setup s;
  TrainConfig cfg;
  cfg.iterations = 100;
  cfg.optimizer = Optimizer::adam;
  cfg.step = 0.05;
  cfg.init = TrainInit::random;
  cfg.seed = 4;
  parallel::set_threads(1);
  const auto a = train(s.g, s.y, cfg, PairWeights::uniform(4));
  parallel::set_threads(4);
  const auto b = train(s.g, s.y, cfg, PairWeights::uniform(4));
  parallel::set_threads(0);
  for (std::size_t i = 0; i < a.records.size(); ++i) REQUIRE(a.records[i].total == b.records[i].total);
}

TEST_CASE("jc resolves the notch before ce") {
  Setup s;
  TrainConfig cfg;
  cfg.init = TrainInit::shrinkwrap;
  cfg.iterations = 3000;
  cfg.log_period = 500;
  const auto jc = train(s.g, s.y, cfg, PairWeights::uniform(4));
  cfg.loss = LossId::ce;
  const auto ce = train(s.g, s.y, cfg, PairWeights::uniform(4));
  REQUIRE(jc.first_notch_correct);
  CHECK(jc.final_pq == 1.0);
  CHECK((!ce.first_notch_correct || *jc.first_notch_correct < *ce.first_notch_correct));
}

TEST_CASE("configuration checks") {
  Setup s;
  TrainConfig cfg;
  cfg.step = 0;
  CHECK_THROWS_AS(train(s.g, s.y, cfg, PairWeights::uniform(4)), std::invalid_argument);
  cfg.step = 1;
  cfg.loss = LossId::j;
  CHECK_THROWS_AS(train(s.g, s.y, cfg, PairWeights::uniform(4)), std::invalid_argument);
}

}
