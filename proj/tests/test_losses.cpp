#include <doctest.h>

#include <cmath>

#include "yseg/losses.hpp"
#include "yseg/reference.hpp"
#include "yseg/rng.hpp"
#include "yseg/softmax.hpp"

using namespace yseg;

namespace {

ProbabilityField field(std::size_t h, std::size_t w, std::size_t c, std::vector<double> v) {
  return ProbabilityField(GridShape{h, w}, c, std::move(v));
}

ProbabilityField target_field(const Target& t) {
  SemanticLabelMap h(t.shape(), 1);
  for (std::size_t e = 0; e < h.elements(); ++e) h[e] = t.label(e);
  return one_hot(h, t.channels());
}

}  // namespace

TEST_SUITE("losses") {

TEST_CASE("hand values") {
  const auto y1 = field(1, 1, 2, {1, 0});
  const auto half = field(1, 1, 2, {0.5, 0.5});
  CHECK(cross_entropy(y1, half).total == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const auto dsc = dsc_loss(y1, half);
  CHECK(dsc.components.at("dice") == doctest::Approx(0.2).epsilon(1e-12));

  const auto y = field(1, 2, 2, {1, 0, 0, 1});
  const auto z = field(1, 2, 2, {0.6, 0.4, 0.3, 0.7});
  const auto w = PairWeights::uniform(2);
  CHECK(j_loss(y, z, w).total == doctest::Approx(-2 * std::log(0.65)).epsilon(1e-12));
  const auto jc = jc_loss(y, z, w);
  CHECK(jc.total == doctest::Approx(0.8616 + 0.4338).epsilon(1e-3));
  CHECK(std::abs(jc.total - jc.components.at("ce") - jc.components.at("j")) < 1e-12);
}

TEST_CASE("optimum is zero") {
  const auto y = field(1, 4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
  const auto w = PairWeights::uniform(4);
  CHECK(cross_entropy(y, y).total == 0.0);
  CHECK(j_loss(y, y, w).total == 0.0);
  CHECK(jc_loss(y, y, w).total == 0.0);
  CHECK(bwm_loss(y, y).total == 0.0);
  CHECK(dsc_loss(y, y).total == 0.0);
}

TEST_CASE("values agree with the naive formulas") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto inst = random_grad_check_instance(s, 2 + s % 2, 4);
    const auto y = target_field(inst.target);
    const auto z = softmax(inst.logits);
    Rng rng(s);
    std::vector<double> lw(16);
    for (auto& v : lw) v = rng.uniform() * 2;
    const PairWeights w(4, lw);
    for (auto id : kAllLosses) {
      const double fast = evaluate_loss(id, inst.target, z, w).total;
      CHECK(fast == doctest::Approx(reference::loss_value(id, y, z, w)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cross-entropy gradient is (z - y) / n") {
  const auto inst = random_grad_check_instance(5, 2, 4);
  const auto z = softmax(inst.logits);
  const auto g = evaluate_loss(LossId::ce, inst.target, inst.logits, PairWeights::uniform(4)).gradient;
  const double n = static_cast<double>(z.elements());
  for (std::size_t e = 0; e < z.elements(); ++e)
    for (std::size_t c = 0; c < 4; ++c) {
      const double expected = (z.at(e, c) - (inst.target.label(e) == c ? 1.0 : 0.0)) / n;
      CHECK(g->at(e, c) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("finite-difference agreement") {
  for (auto id : kAllLosses) {
    const auto r = grad_check(id, 11, 20, 4, PairWeights::uniform(4));
    CHECK(r.max_rel_err < 1e-4);
  }
  CHECK(grad_check(LossId::ce, 3, 10, 4, PairWeights::uniform(4)).max_rel_err < 1e-6);
  CHECK(grad_check(LossId::bwm, 3, 10, 4, PairWeights::uniform(4)).max_rel_err < 1e-6);
}

TEST_CASE("pair weights: scaling, diagonal, absent classes") {
  const auto inst = random_grad_check_instance(21, 2, 4);
  const auto w = PairWeights::uniform(4);
  const auto base = evaluate_loss(LossId::j, inst.target, inst.logits, w);
  const auto scaled = evaluate_loss(LossId::j, inst.target, inst.logits, w.scaled(2.5));
  CHECK(scaled.total == doctest::Approx(2.5 * base.total).epsilon(1e-12));
  for (std::size_t i = 0; i < base.gradient->values().size(); ++i)
    CHECK(scaled.gradient->values()[i] == doctest::Approx(2.5 * base.gradient->values()[i]).epsilon(1e-12));

  std::vector<double> diag(16, 1.0);
  const auto with_diag = evaluate_loss(LossId::j, inst.target, inst.logits, PairWeights(4, diag));
  CHECK(with_diag.total == base.total);
  CHECK(*with_diag.gradient == *base.gradient);

  // A fifth channel that never occurs in the target.
  SemanticLabelMap h(inst.target.shape(), 1);
  for (std::size_t e = 0; e < h.elements(); ++e) h[e] = inst.target.label(e);
  const auto t5 = Target::from_semantic(h, 5);
  LogitField l5(inst.logits.shape(), 5, 0.0);
  for (std::size_t e = 0; e < h.elements(); ++e)
    for (std::size_t c = 0; c < 4; ++c) l5.at(e, c) = inst.logits.at(e, c);
  for (auto id : kAllLosses) {
    const auto v = evaluate_loss(id, t5, l5, PairWeights::uniform(5));
    CHECK(std::isfinite(v.total));
    for (double g : v.gradient->values()) REQUIRE(std::isfinite(g));
  }
}

TEST_CASE("balanced target makes BWM equal CE") {
  const auto y = field(2, 2, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
  const auto z = field(2, 2, 4, {.4, .3, .2, .1, .1, .5, .2, .2, .25, .25, .25, .25, .1, .1, .1, .7});
  CHECK(bwm_loss(y, z).total == doctest::Approx(cross_entropy(y, z).total).epsilon(1e-14));
}

TEST_CASE("input validation") {
  const auto y = field(1, 2, 2, {1, 0, 0, 1});
  const auto z = field(1, 3, 2, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
  CHECK_THROWS_AS(cross_entropy(y, z), ShapeMismatch);
  const auto soft = field(1, 2, 2, {0.9, 0.1, 0, 1});
  CHECK_THROWS_AS(Target::from_one_hot(soft), DataError);
}

}
