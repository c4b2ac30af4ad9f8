#include "yseg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "yseg/parallel.hpp"
#include "yseg/rng.hpp"
#include "yseg/softmax.hpp"

namespace yseg {

LossId parse_loss_id(std::string_view s) {
  if (s == "ce") return LossId::ce;
  if (s == "j") return LossId::j;
  if (s == "jc") return LossId::jc;
  if (s == "bwm") return LossId::bwm;
  if (s == "dsc") return LossId::dsc;
  throw std::invalid_argument("unknown loss '" + std::string(s) + "' (expected ce|j|jc|bwm|dsc)");
}

std::string_view to_string(LossId id) {
  switch (id) {
    case LossId::ce: return "ce";
    case LossId::j: return "j";
    case LossId::jc: return "jc";
    case LossId::bwm: return "bwm";
    case LossId::dsc: return "dsc";
  }
  return "?";
}

PairWeights::PairWeights(std::size_t classes, std::vector<double> weights)
    : classes_(classes), w_(std::move(weights)) {
  if (w_.size() != classes_ * classes_) throw std::invalid_argument("pair weights: need classes^2 entries");
  for (double v : w_)
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("pair weights must be finite and non-negative");
}

PairWeights PairWeights::uniform(std::size_t classes) {
  std::vector<double> w(classes * classes, 1.0);
  for (std::size_t i = 0; i < classes; ++i) w[i * classes + i] = 0.0;
  return PairWeights(classes, std::move(w));
}

PairWeights PairWeights::scaled(double c) const {
  auto w = w_;
  for (double& v : w) v *= c;
  return PairWeights(classes_, std::move(w));
}

Target Target::from_one_hot(const ProbabilityField& y) {
  Target t;
  t.shape_ = y.shape();
  t.channels_ = y.channels();
  if (t.channels_ > 255) throw DataError("target: too many channels");
  t.labels_.resize(y.elements());
  t.counts_.assign(t.channels_, 0.0);
  for (std::size_t e = 0; e < y.elements(); ++e) {
    const auto v = y.element(e);
    std::size_t ones = 0, hot = 0;
    for (std::size_t l = 0; l < v.size(); ++l) {
      if (v[l] == 1.0) {
        ++ones;
        hot = l;
      } else if (v[l] != 0.0) {
        ones = 2;
      }
    }
    if (ones != 1) throw DataError("target: element " + std::to_string(e) + " is not one-hot");
    t.labels_[e] = static_cast<std::uint8_t>(hot);
    t.counts_[hot] += 1.0;
  }
  return t;
}

Target Target::from_semantic(const SemanticLabelMap& h, std::size_t channels) {
  Target t;
  t.shape_ = h.shape();
  t.channels_ = channels;
  t.labels_.assign(h.values().begin(), h.values().end());
  t.counts_.assign(channels, 0.0);
  for (std::size_t e = 0; e < t.labels_.size(); ++e) {
    if (t.labels_[e] >= channels)
      throw DataError("target: class " + std::to_string(t.labels_[e]) + " is not below " + std::to_string(channels));
    t.counts_[t.labels_[e]] += 1.0;
  }
  return t;
}

namespace {

bool uses_ce(LossId id) { return id == LossId::ce || id == LossId::jc || id == LossId::dsc; }
bool uses_j(LossId id) { return id == LossId::j || id == LossId::jc; }

// Sums gathered in one pass over the grid:
//   conf[i*C + l]  = sum over elements of true class l of z_i
//   logs[l]        = sum over elements of true class l of log max(z_l, eps)
//   sq[l]          = sum over all elements of z_l^2
struct Sums {
  std::vector<double> conf, logs, sq;
};

Sums gather(const Target& t, const ProbabilityField& z) {
  const std::size_t c = t.channels();
  std::vector<double> flat(c * c + 2 * c, 0.0);
  parallel::blocked_accumulate(t.elements(), flat, [&](std::size_t lo, std::size_t hi, std::span<double> acc) {
    for (std::size_t e = lo; e < hi; ++e) {
      const auto p = z.element(e);
      const std::size_t l = t.label(e);
      for (std::size_t i = 0; i < c; ++i) {
        acc[i * c + l] += p[i];
        acc[c * c + c + i] += p[i] * p[i];
      }
      acc[c * c + l] += std::log(std::max(p[l], kLogClamp));
    }
  });
  Sums s;
  s.conf.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(c * c));
  s.logs.assign(flat.begin() + static_cast<std::ptrdiff_t>(c * c), flat.begin() + static_cast<std::ptrdiff_t>(c * c + c));
  s.sq.assign(flat.begin() + static_cast<std::ptrdiff_t>(c * c + c), flat.end());
  return s;
}

void check_shapes(const Target& t, const ProbabilityField& z) {
  if (!(t.shape() == z.shape()) || t.channels() != z.channels())
    throw ShapeMismatch("loss: target " + t.shape().str() + "x" + std::to_string(t.channels()) +
                        " vs prediction " + z.shape().str() + "x" + std::to_string(z.channels()));
}

}  // namespace

LossValue evaluate_loss(LossId id, const Target& t, const ProbabilityField& z, const PairWeights& w,
                        bool with_gradient) {
  check_shapes(t, z);
  const std::size_t c = t.channels();
  const std::size_t n = t.elements();
  const double inv_n = 1.0 / static_cast<double>(n);
  if (uses_j(id) && w.classes() != c)
    throw ShapeMismatch("loss: pair weights are " + std::to_string(w.classes()) + "x" +
                        std::to_string(w.classes()) + " for " + std::to_string(c) + " classes");

  const Sums s = gather(t, z);
  LossValue out;

  if (uses_ce(id)) {
    double logsum = 0.0;
    for (std::size_t l = 0; l < c; ++l) logsum += s.logs[l];
    out.components["ce"] = -logsum * inv_n;
  }

  // J: s_ik = 1/2 + (conf[i][i]/n_i - conf[i][k]/n_k)/2 for present i != k.
  // Its z-gradient at an element of true class l is
  //   jcoef[i][l] = -sum_k lambda_ik / s_ik * ([l==i]/n_i - [l==k]/n_k) / 2.
  std::vector<double> jcoef;
  if (uses_j(id)) {
    jcoef.assign(c * c, 0.0);
    double value = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      const double ni = t.count(i);
      if (ni == 0.0) continue;
      for (std::size_t k = 0; k < c; ++k) {
        const double nk = t.count(k);
        if (k == i || nk == 0.0) continue;
        const double lambda = w(i, k);
        const double arg = 0.5 + 0.5 * (s.conf[i * c + i] / ni - s.conf[i * c + k] / nk);
        value -= lambda * std::log(std::clamp(arg, kLogClamp, 1.0));
        if (arg < kLogClamp) continue;
        const double scale = lambda / std::min(arg, 1.0);
        jcoef[i * c + i] -= scale * 0.5 / ni;
        jcoef[i * c + k] += scale * 0.5 / nk;
      }
    }
    out.components["j"] = value;
  }

  std::vector<double> class_weight;
  if (id == LossId::bwm) {
    class_weight.assign(c, 0.0);
    double value = 0.0;
    for (std::size_t l = 0; l < c; ++l) {
      if (t.count(l) == 0.0) continue;
      class_weight[l] = static_cast<double>(n) / (static_cast<double>(c) * t.count(l));
      value += class_weight[l] * s.logs[l];
    }
    out.components["bwm"] = -value * inv_n;
  }

  // Soft Dice per present class: d_l = 2 N_l / (Z_l + n_l).
  std::vector<double> dice_den, dice_num;
  double present = 0.0;
  if (id == LossId::dsc) {
    dice_den.assign(c, 0.0);
    dice_num.assign(c, 0.0);
    double sum = 0.0;
    for (std::size_t l = 0; l < c; ++l) {
      if (t.count(l) == 0.0) continue;
      present += 1.0;
      dice_num[l] = s.conf[l * c + l];
      dice_den[l] = s.sq[l] + t.count(l);
      sum += 2.0 * dice_num[l] / dice_den[l];
    }
    out.components["dice"] = present > 0.0 ? 1.0 - sum / present : 0.0;
  }

  for (const auto& [name, v] : out.components) out.total += v;
  if (!with_gradient) return out;

  ProbabilityField gz(z.shape(), c, 0.0);
  parallel::for_each(n, [&](std::size_t e) {
    const auto p = z.element(e);
    auto g = gz.element(e);
    const std::size_t l = t.label(e);
    if (uses_ce(id) && p[l] > kLogClamp) g[l] -= inv_n / p[l];
    if (id == LossId::bwm && p[l] > kLogClamp) g[l] -= class_weight[l] * inv_n / p[l];
    if (!jcoef.empty())
      for (std::size_t i = 0; i < c; ++i) g[i] += jcoef[i * c + l];
    if (id == LossId::dsc && present > 0.0) {
      for (std::size_t m = 0; m < c; ++m) {
        if (dice_den[m] == 0.0) continue;
        const double d = dice_den[m];
        const double dd = (m == l ? 2.0 / d : 0.0) - 4.0 * dice_num[m] * p[m] / (d * d);
        g[m] -= dd / present;
      }
    }
  });
  out.gradient = softmax_backward(z, gz);
  return out;
}

LossValue evaluate_loss(LossId id, const Target& target, const LogitField& logits, const PairWeights& w) {
  return evaluate_loss(id, target, softmax(logits), w, true);
}

namespace {
PairWeights weights_for(const ProbabilityField& y) { return PairWeights::uniform(y.channels()); }
}  // namespace

LossValue cross_entropy(const ProbabilityField& y, const ProbabilityField& z) {
  return evaluate_loss(LossId::ce, Target::from_one_hot(y), z, weights_for(y));
}
LossValue cross_entropy(const ProbabilityField& y, const LogitField& logits) {
  return evaluate_loss(LossId::ce, Target::from_one_hot(y), logits, weights_for(y));
}
LossValue j_loss(const ProbabilityField& y, const ProbabilityField& z, const PairWeights& w) {
  return evaluate_loss(LossId::j, Target::from_one_hot(y), z, w);
}
LossValue j_loss(const ProbabilityField& y, const LogitField& logits, const PairWeights& w) {
  return evaluate_loss(LossId::j, Target::from_one_hot(y), logits, w);
}
LossValue jc_loss(const ProbabilityField& y, const ProbabilityField& z, const PairWeights& w) {
  return evaluate_loss(LossId::jc, Target::from_one_hot(y), z, w);
}
LossValue jc_loss(const ProbabilityField& y, const LogitField& logits, const PairWeights& w) {
  return evaluate_loss(LossId::jc, Target::from_one_hot(y), logits, w);
}
LossValue bwm_loss(const ProbabilityField& y, const ProbabilityField& z) {
  return evaluate_loss(LossId::bwm, Target::from_one_hot(y), z, weights_for(y));
}
LossValue bwm_loss(const ProbabilityField& y, const LogitField& logits) {
  return evaluate_loss(LossId::bwm, Target::from_one_hot(y), logits, weights_for(y));
}
LossValue dsc_loss(const ProbabilityField& y, const ProbabilityField& z) {
  return evaluate_loss(LossId::dsc, Target::from_one_hot(y), z, weights_for(y));
}
LossValue dsc_loss(const ProbabilityField& y, const LogitField& logits) {
  return evaluate_loss(LossId::dsc, Target::from_one_hot(y), logits, weights_for(y));
}

LogitField finite_difference_gradient(LossId id, const Target& target, const LogitField& logits,
                                      const PairWeights& w, double step) {
  LogitField probe = logits;
  LogitField out(logits.shape(), logits.channels());
  auto v = probe.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double keep = v[i];
    v[i] = keep + step;
    const double up = evaluate_loss(id, target, softmax(probe), w).total;
    v[i] = keep - step;
    const double down = evaluate_loss(id, target, softmax(probe), w).total;
    v[i] = keep;
    out.values()[i] = (up - down) / (2.0 * step);
  }
  return out;
}

double max_relative_error(const LogitField& analytic, const LogitField& numeric, double floor) {
  if (!(analytic.shape() == numeric.shape()) || analytic.channels() != numeric.channels())
    throw ShapeMismatch("max_relative_error: shape mismatch");
  double worst = 0.0;
  const auto a = analytic.values();
  const auto b = numeric.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double den = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / den);
  }
  return worst;
}

GradCheckInstance random_grad_check_instance(std::uint64_t seed, std::size_t rank, std::size_t classes) {
  Rng rng(seed);
  const std::size_t hi = rank == 2 ? 8 : 4;
  std::vector<std::size_t> dims(rank);
  for (auto& d : dims) d = rng.uniform_int(2, hi);
  const GridShape shape(dims);
  if (shape.size() < classes) throw std::invalid_argument("grad check: grid too small for every class");

  SemanticLabelMap h(shape, 1);
  for (std::size_t e = 0; e < h.elements(); ++e) h[e] = static_cast<std::uint8_t>(rng.uniform_int(0, classes - 1));
  // Plant every class at a distinct random element.
  std::vector<std::size_t> order(shape.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < classes; ++i) {
    std::swap(order[i], order[rng.uniform_int(i, order.size() - 1)]);
    h[order[i]] = static_cast<std::uint8_t>(i);
  }

  LogitField logits(shape, classes);
  for (double& v : logits.values()) v = rng.normal();
  return {Target::from_semantic(h, classes), std::move(logits)};
}

GradCheckResult grad_check(LossId id, std::uint64_t seed, std::size_t trials, std::size_t classes,
                           const PairWeights& w, double step) {
  GradCheckResult r;
  r.loss = id;
  r.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto inst = random_grad_check_instance(stream_seed(seed, t), t % 2 == 0 ? 2 : 3, classes);
    const auto analytic = evaluate_loss(id, inst.target, inst.logits, w);
    const auto numeric = finite_difference_gradient(id, inst.target, inst.logits, w, step);
    r.max_rel_err = std::max(r.max_rel_err, max_relative_error(*analytic.gradient, numeric));
    r.mean_loss += analytic.total / static_cast<double>(trials);
    for (const auto& [name, v] : analytic.components) r.mean_components[name] += v / static_cast<double>(trials);
  }
  return r;
}

}  // namespace yseg
