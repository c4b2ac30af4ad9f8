#include "yseg/simulators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "yseg/parallel.hpp"
#include "yseg/rng.hpp"
#include "yseg/softmax.hpp"

namespace yseg {

ClassifierKind parse_classifier(std::string_view s) {
  if (s == "c1" || s == "C1") return ClassifierKind::c1;
  if (s == "c3" || s == "C3") return ClassifierKind::c3;
  throw std::invalid_argument("unknown classifier '" + std::string(s) + "' (expected c1 or c3)");
}

std::string_view to_string(ClassifierKind k) { return k == ClassifierKind::c1 ? "c1" : "c3"; }

std::vector<double> ImbalanceSimConfig::default_pis() {
  std::vector<double> pis;
  for (int i = 1; i <= 50; ++i) pis.push_back(i / 100.0);
  return pis;
}

void ImbalanceSimConfig::validate() const {
  if (pis.empty()) throw std::invalid_argument("imbalance: empty pi grid");
  for (double p : pis)
    if (!(p > 0.0 && p <= 0.5)) throw std::invalid_argument("imbalance: pi must lie in (0, 0.5], got " + std::to_string(p));
  if (samples < 100) throw std::invalid_argument("imbalance: need at least 100 samples per trial");
  if (trials < 2) throw std::invalid_argument("imbalance: need at least 2 trials");
}

namespace {

ConfusionCounts draw_trial(Rng& rng, std::size_t n, double pi, double q) {
  ConfusionCounts c;
  for (std::size_t i = 0; i < n; ++i) {
    const bool truth = rng.bernoulli(pi);
    const bool pred = rng.bernoulli(q);
    if (truth) {
      ++(pred ? c.tp : c.fn);
    } else {
      ++(pred ? c.fp : c.tn);
    }
  }
  return c;
}

bool degenerate(const ConfusionCounts& c) {
  return c.tp + c.fn == 0 || c.tn + c.fp == 0 || c.tp + c.fp == 0 || c.fn + c.tn == 0;
}

}  // namespace

ImbalanceResult run_imbalance_sim(const ImbalanceSimConfig& cfg) {
  cfg.validate();
  const std::size_t np = cfg.pis.size();
  ImbalanceResult out;
  out.classifier = cfg.classifier;
  out.trials.resize(np * cfg.trials);
  std::vector<std::size_t> redraws(out.trials.size(), 0);

  parallel::for_each(out.trials.size(), [&](std::size_t idx) {
    const std::size_t ip = idx / cfg.trials, t = idx % cfg.trials;
    const double pi = cfg.pis[ip];
    const double q = cfg.classifier == ClassifierKind::c1 ? pi : 0.5;
    Rng rng(stream_seed(cfg.seed, ip, t));
    ConfusionCounts c = draw_trial(rng, cfg.samples, pi, q);
    while (degenerate(c)) {
      ++redraws[idx];
      c = draw_trial(rng, cfg.samples, pi, q);
    }
    auto& rec = out.trials[idx];
    rec.pi = pi;
    rec.trial = t;
    rec.counts = c;
    const auto m = binary_measures(c);
    for (std::size_t k = 0; k < 6; ++k) rec.measures[k] = m.at(std::string(kBinaryMeasures[k]));
  });
  for (auto r : redraws) out.resampled += r;

  for (std::size_t ip = 0; ip < np; ++ip) {
    ImbalanceSummary s;
    s.pi = cfg.pis[ip];
    const auto* first = &out.trials[ip * cfg.trials];
    for (std::size_t k = 0; k < 6; ++k) {
      double sum = 0.0;
      for (std::size_t t = 0; t < cfg.trials; ++t) sum += first[t].measures[k];
      const double mean = sum / static_cast<double>(cfg.trials);
      double ss = 0.0;
      for (std::size_t t = 0; t < cfg.trials; ++t) ss += (first[t].measures[k] - mean) * (first[t].measures[k] - mean);
      s.mean[k] = mean;
      s.stddev[k] = std::sqrt(ss / static_cast<double>(cfg.trials - 1));
    }
    out.summary.push_back(s);
  }
  return out;
}

ImbalanceSimConfig correlation_defaults() {
  ImbalanceSimConfig cfg;
  cfg.classifier = ClassifierKind::c3;
  cfg.samples = 400;
  cfg.trials = 500;
  cfg.pis = {0.01, 0.25, 0.5};
  return cfg;
}

std::vector<CorrelationPoint> mcc_j_correlation(const ImbalanceResult& result) {
  if (result.classifier != ClassifierKind::c3)
    throw std::invalid_argument("mcc/j correlation is defined for the c3 classifier");
  std::vector<CorrelationPoint> out;
  std::size_t i = 0;
  while (i < result.trials.size()) {
    const double pi = result.trials[i].pi;
    std::vector<double> j, mcc;
    for (; i < result.trials.size() && result.trials[i].pi == pi; ++i) {
      j.push_back(result.trials[i].measures[0]);
      mcc.push_back(result.trials[i].measures[1]);
    }
    try {
      out.push_back({pi, pearson(mcc, j)});
    } catch (const std::invalid_argument& e) {
      throw DataError("mcc/j correlation at pi=" + std::to_string(pi) + ": " + e.what());
    }
  }
  return out;
}

std::vector<CorrelationPoint> mcc_j_correlation(const ImbalanceSimConfig& cfg) {
  if (cfg.classifier != ClassifierKind::c3)
    throw std::invalid_argument("mcc/j correlation is defined for the c3 classifier");
  return mcc_j_correlation(run_imbalance_sim(cfg));
}

// ---------------------------------------------------------------------------

void ShrinkwrapConfig::validate() const {
  scene.validate();
  transform.validate();
  if (initial_margin < 1) throw std::invalid_argument("shrinkwrap: initial margin must be >= 1");
  if (iterations_per_margin < 1) throw std::invalid_argument("shrinkwrap: iterations per margin must be >= 1");
  if (!(initial_confidence > 0.25 && initial_confidence <= final_confidence && final_confidence < 1.0))
    throw std::invalid_argument("shrinkwrap: need 0.25 < initial confidence <= final confidence < 1");
  if (ramp_iterations < 1) throw std::invalid_argument("shrinkwrap: ramp needs at least one iteration");
  if (iterations != 0 && iterations <= shrinkwrap_iteration())
    throw std::invalid_argument("shrinkwrap: " + std::to_string(iterations) +
                                " iterations never reach margin 0 (needs > " +
                                std::to_string(shrinkwrap_iteration()) + ")");
}

std::size_t ShrinkwrapConfig::resolved_iterations() const {
  return iterations != 0 ? iterations : shrinkwrap_iteration() + ramp_iterations + 1;
}

ProbabilityField shrinkwrap_field(const InstanceLabelMap& g, const SemanticLabelMap& h, std::size_t channels,
                                  std::size_t margin, double confidence, double ramp) {
  const std::size_t n = g.elements();
  std::vector<std::uint8_t> fg(n);
  for (std::size_t e = 0; e < n; ++e) fg[e] = g[e] != 0;
  const auto mask = margin > 0 ? dilate(g.shape(), fg, margin) : fg;

  ProbabilityField z(g.shape(), channels, 0.0);
  const double rest = (1.0 - confidence) / static_cast<double>(channels - 1);
  parallel::for_each(n, [&](std::size_t e) {
    const std::size_t pres = mask[e] ? cls::cell : cls::background;
    for (std::size_t c = 0; c < channels; ++c) {
      const double prescribed = c == pres ? confidence : rest;
      const double truth = c == h[e] ? 1.0 : 0.0;
      z.at(e, c) = ramp >= 1.0 ? truth : (1.0 - ramp) * prescribed + ramp * truth;
    }
  });
  return z;
}

ShrinkwrapResult run_shrinkwrap(const ShrinkwrapConfig& cfg, const PairWeights& w) {
  cfg.validate();
  const auto g = generate_scene(cfg.scene);
  const auto h = to_semantic(g, cfg.transform);
  const std::size_t channels = cfg.transform.channels();
  if (w.classes() != channels)
    throw std::invalid_argument("shrinkwrap: weights cover " + std::to_string(w.classes()) + " classes, need " +
                                std::to_string(channels));
  const auto target = Target::from_semantic(h, channels);

  ShrinkwrapResult out;
  const std::size_t sw = cfg.shrinkwrap_iteration();
  out.shrinkwrap_iteration = sw;
  const std::size_t total = cfg.resolved_iterations();
  for (std::size_t t = 0; t < total; ++t) {
    ShrinkwrapRecord r;
    r.iteration = t;
    if (t < sw) {
      r.margin = cfg.initial_margin - t / cfg.iterations_per_margin;
      r.confidence = cfg.initial_confidence +
                     (cfg.final_confidence - cfg.initial_confidence) * static_cast<double>(t) / static_cast<double>(sw);
    } else {
      r.margin = 0;
      r.confidence = cfg.final_confidence;
      r.ramp = std::min(1.0, static_cast<double>(t - sw) / static_cast<double>(cfg.ramp_iterations));
    }
    const auto z = shrinkwrap_field(g, h, channels, r.margin, r.confidence, r.ramp);
    r.grad_ce = l2_norm(*evaluate_loss(LossId::ce, target, z, w, true).gradient);
    r.grad_j = l2_norm(*evaluate_loss(LossId::j, target, z, w, true).gradient);
    r.grad_jc = l2_norm(*evaluate_loss(LossId::jc, target, z, w, true).gradient);
    out.records.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------

void LandscapeConfig::validate() const {
  if (resolution < 3 || resolution % 2 == 0) throw std::invalid_argument("landscape: resolution must be odd and >= 3");
  if (!(span > 0.0) || !std::isfinite(span)) throw std::invalid_argument("landscape: span must be positive");
}

LogitField optimal_logits(const ProbabilityField& y, double margin) {
  const auto t = Target::from_one_hot(y);
  LogitField theta(y.shape(), y.channels(), 0.0);
  for (std::size_t e = 0; e < y.elements(); ++e) theta.at(e, t.label(e)) = margin;
  return theta;
}

namespace {

LogitField normalized_direction(const LogitField& theta, std::uint64_t seed) {
  const std::size_t n = theta.elements(), ch = theta.channels();
  LogitField d(theta.shape(), ch, 0.0);
  Rng rng(seed);
  for (auto& v : d.values()) v = rng.normal();
  for (std::size_t c = 0; c < ch; ++c) {
    double nt = 0.0, nd = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      nt += theta.at(e, c) * theta.at(e, c);
      nd += d.at(e, c) * d.at(e, c);
    }
    const double scale = nd > 0.0 ? std::sqrt(nt / nd) : 0.0;
    for (std::size_t e = 0; e < n; ++e) d.at(e, c) *= scale;
  }
  return d;
}

}  // namespace

LandscapeResult landscape_scan(const LandscapeConfig& cfg, const ProbabilityField& y, const LogitField& theta_star,
                               const PairWeights& w) {
  cfg.validate();
  if (!(y.shape() == theta_star.shape()) || y.channels() != theta_star.channels())
    throw ShapeMismatch("landscape: target and logits differ in shape");
  const auto target = Target::from_one_hot(y);
  const auto delta = normalized_direction(theta_star, stream_seed(cfg.seed, 1));
  const auto eta = normalized_direction(theta_star, stream_seed(cfg.seed, 2));

  LandscapeResult out;
  const std::size_t res = cfg.resolution;
  out.resolution = res;
  for (std::size_t i = 0; i < res; ++i)
    out.coords.push_back(-cfg.span + 2.0 * cfg.span * static_cast<double>(i) / static_cast<double>(res - 1));
  out.values.assign(res * res, 0.0);
  out.non_finite.assign(res * res, 0);

  parallel::for_each(res * res, [&](std::size_t cell) {
    const double a = out.coords[cell / res], b = out.coords[cell % res];
    LogitField theta = theta_star;
    auto tv = theta.values();
    const auto dv = delta.values(), ev = eta.values();
    for (std::size_t i = 0; i < tv.size(); ++i) tv[i] += a * dv[i] + b * ev[i];
    double v = std::numeric_limits<double>::quiet_NaN();
    try {
      v = evaluate_loss(cfg.loss, target, softmax(theta), w, false).total;
    } catch (const DataError&) {
    }
    out.values[cell] = v;
    out.non_finite[cell] = !std::isfinite(v);
  });
  return out;
}

}  // namespace yseg
