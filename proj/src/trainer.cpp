#include "yseg/trainer.hpp"

#include <cmath>

#include "yseg/metrics.hpp"
#include "yseg/parallel.hpp"
#include "yseg/rng.hpp"
#include "yseg/simulators.hpp"
#include "yseg/softmax.hpp"

namespace yseg {

Optimizer parse_optimizer(std::string_view s) {
  if (s == "gd") return Optimizer::gd;
  if (s == "adam") return Optimizer::adam;
  throw std::invalid_argument("unknown optimizer '" + std::string(s) + "' (expected gd or adam)");
}

TrainInit parse_train_init(std::string_view s) {
  if (s == "zeros") return TrainInit::zeros;
  if (s == "shrinkwrap") return TrainInit::shrinkwrap;
  if (s == "random") return TrainInit::random;
  throw std::invalid_argument("unknown init '" + std::string(s) + "' (expected zeros, shrinkwrap or random)");
}

std::string_view to_string(Optimizer o) { return o == Optimizer::gd ? "gd" : "adam"; }

std::string_view to_string(TrainInit i) {
  switch (i) {
    case TrainInit::zeros: return "zeros";
    case TrainInit::shrinkwrap: return "shrinkwrap";
    case TrainInit::random: return "random";
  }
  return "?";
}

void TrainConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("train: step must be positive");
  if (log_period < 1) throw std::invalid_argument("train: log period must be >= 1");
  if (loss == LossId::j) throw std::invalid_argument("train: j alone has no per-element anchor; use jc");
  if (!(init_confidence > 0.25 && init_confidence < 1.0))
    throw std::invalid_argument("train: init confidence must lie in (0.25, 1)");
  post.validate();
}

namespace {

LogitField initial_logits(const InstanceLabelMap& g, const Target& t, const TrainConfig& cfg) {
  const std::size_t ch = t.channels();
  switch (cfg.init) {
    case TrainInit::zeros:
      break;
    case TrainInit::random: {
      LogitField theta(t.shape(), ch, 0.0);
      Rng rng(stream_seed(cfg.seed, 0x7a1));
      for (auto& v : theta.values()) v = 0.01 * rng.normal();
      return theta;
    }
    case TrainInit::shrinkwrap: {
      SemanticLabelMap h(t.shape(), 1, 0);
      for (std::size_t e = 0; e < t.elements(); ++e) h[e] = t.label(e);
      return log_probabilities(shrinkwrap_field(g, h, ch, 0, cfg.init_confidence, 0.0));
    }
  }
  return LogitField(t.shape(), ch, 0.0);
}

}  // namespace

TrainTrace train(const InstanceLabelMap& g, const ProbabilityField& y, const TrainConfig& cfg, const PairWeights& w) {
  cfg.validate();
  if (!(g.shape() == y.shape())) throw ShapeMismatch("train: " + g.shape().str() + " vs " + y.shape().str());
  const auto target = Target::from_one_hot(y);
  const std::size_t n = target.elements();

  std::vector<std::size_t> notch;
  for (std::size_t e = 0; e < n; ++e)
    if (target.label(e) == cls::gap) notch.push_back(e);

  LogitField theta = initial_logits(g, target, cfg);
  std::vector<double> m1, m2;
  if (cfg.optimizer == Optimizer::adam) {
    m1.assign(theta.values().size(), 0.0);
    m2.assign(theta.values().size(), 0.0);
  }

  TrainTrace trace;
  for (std::size_t it = 0; it <= cfg.iterations; ++it) {
    for (double v : theta.values())
      if (!std::isfinite(v)) throw TrainingDiverged("train: non-finite logits at iteration " + std::to_string(it), trace);
    const auto z = softmax(theta);
    auto lv = evaluate_loss(cfg.loss, target, z, w, true);

    TrainRecord rec;
    rec.iteration = it;
    rec.total = lv.total;
    rec.components = lv.components;
    const auto map = map_decision(z);
    rec.notch_correct = true;
    for (auto e : notch) rec.notch_correct = rec.notch_correct && map[e] == cls::gap;
    if (rec.notch_correct && !trace.first_notch_correct) trace.first_notch_correct = it;
    if (!trace.first_all_correct) {
      bool all = true;
      for (std::size_t e = 0; e < n && all; ++e) all = map[e] == target.label(e);
      if (all) trace.first_all_correct = it;
    }
    if (it % cfg.log_period == 0 || it == cfg.iterations) {
      rec.pq = panoptic(g, to_instances(resolve_gaps(map, z, cfg.post), cfg.post)).at("pq");
      trace.final_pq = *rec.pq;
    }
    const bool finite = std::isfinite(lv.total);
    trace.records.push_back(std::move(rec));
    if (!finite) throw TrainingDiverged("train: non-finite loss at iteration " + std::to_string(it), trace);
    if (it == cfg.iterations) break;

    auto tv = theta.values();
    const auto gv = lv.gradient->values();
    if (cfg.optimizer == Optimizer::gd) {
      parallel::for_each(tv.size(), [&](std::size_t i) { tv[i] -= cfg.step * gv[i]; });
    } else {
      const double t = static_cast<double>(it + 1);
      const double c1 = 1.0 - std::pow(cfg.adam_beta1, t), c2 = 1.0 - std::pow(cfg.adam_beta2, t);
      parallel::for_each(tv.size(), [&](std::size_t i) {
        m1[i] = cfg.adam_beta1 * m1[i] + (1.0 - cfg.adam_beta1) * gv[i];
        m2[i] = cfg.adam_beta2 * m2[i] + (1.0 - cfg.adam_beta2) * gv[i] * gv[i];
        tv[i] -= cfg.step * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + cfg.adam_eps);
      });
    }
  }
  return trace;
}

}  // namespace yseg
