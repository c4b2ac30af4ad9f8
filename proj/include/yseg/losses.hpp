#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "yseg/grid.hpp"

namespace yseg {

enum class LossId { ce, j, jc, bwm, dsc };

LossId parse_loss_id(std::string_view s);
std::string_view to_string(LossId id);
inline constexpr LossId kAllLosses[] = {LossId::ce, LossId::j, LossId::jc, LossId::bwm, LossId::dsc};

/// Every log argument is clamped from below at this value.
inline constexpr double kLogClamp = 1e-7;

/// Pairwise class weights lambda[i][k]. The diagonal never contributes.
class PairWeights {
 public:
  PairWeights() = default;
  PairWeights(std::size_t classes, std::vector<double> weights);

  /// 1 off the diagonal, 0 on it.
  static PairWeights uniform(std::size_t classes);

  std::size_t classes() const { return classes_; }
  double operator()(std::size_t i, std::size_t k) const { return w_[i * classes_ + k]; }
  PairWeights scaled(double c) const;

 private:
  std::size_t classes_ = 0;
  std::vector<double> w_;
};

/// Validated one-hot target: per-element class plus class counts n_l.
class Target {
 public:
  /// Throws DataError unless every element of `y` is exactly one-hot.
  static Target from_one_hot(const ProbabilityField& y);
  static Target from_semantic(const SemanticLabelMap& h, std::size_t channels);

  const GridShape& shape() const { return shape_; }
  std::size_t channels() const { return channels_; }
  std::size_t elements() const { return labels_.size(); }
  std::uint8_t label(std::size_t e) const { return labels_[e]; }
  std::span<const std::uint8_t> labels() const { return labels_; }
  double count(std::size_t l) const { return counts_[l]; }

 private:
  GridShape shape_;
  std::size_t channels_ = 0;
  std::vector<std::uint8_t> labels_;
  std::vector<double> counts_;
};

struct LossValue {
  double total = 0.0;
  /// Named parts; `total` is their sum.
  std::map<std::string, double> components;
  /// d total / d logits, present when requested.
  std::optional<LogitField> gradient;
};

/// Loss of probabilities `z` against `target`. With `with_gradient`, the
/// gradient is taken with respect to logits theta where z = softmax(theta);
/// this stays defined for z with exact zeros (e.g. a one-hot z).
LossValue evaluate_loss(LossId id, const Target& target, const ProbabilityField& z, const PairWeights& w,
                        bool with_gradient = false);

/// Applies the softmax to `logits` and returns value and logit gradient.
LossValue evaluate_loss(LossId id, const Target& target, const LogitField& logits, const PairWeights& w);

// Convenience forms taking a one-hot field directly.
LossValue cross_entropy(const ProbabilityField& y, const ProbabilityField& z);
LossValue cross_entropy(const ProbabilityField& y, const LogitField& logits);
LossValue j_loss(const ProbabilityField& y, const ProbabilityField& z, const PairWeights& w);
LossValue j_loss(const ProbabilityField& y, const LogitField& logits, const PairWeights& w);
LossValue jc_loss(const ProbabilityField& y, const ProbabilityField& z, const PairWeights& w);
LossValue jc_loss(const ProbabilityField& y, const LogitField& logits, const PairWeights& w);
LossValue bwm_loss(const ProbabilityField& y, const ProbabilityField& z);
LossValue bwm_loss(const ProbabilityField& y, const LogitField& logits);
LossValue dsc_loss(const ProbabilityField& y, const ProbabilityField& z);
LossValue dsc_loss(const ProbabilityField& y, const LogitField& logits);

// ---------------------------------------------------------------------------
// Finite-difference gradient checking.

/// Central differences of the loss with respect to every logit.
LogitField finite_difference_gradient(LossId id, const Target& target, const LogitField& logits,
                                      const PairWeights& w, double step = 1e-5);

/// Entry-wise relative error max |a - n| / max(|a|, |n|, floor). Entries below
/// `floor` in magnitude are compared in absolute terms.
double max_relative_error(const LogitField& analytic, const LogitField& numeric, double floor = 1e-6);

struct GradCheckInstance {
  Target target;
  LogitField logits;
};

/// Random target (every class present) and N(0,1) logits on a random grid
/// of up to 8x8 (rank 2) or 4x4x4 (rank 3).
GradCheckInstance random_grad_check_instance(std::uint64_t seed, std::size_t rank, std::size_t classes);

struct GradCheckResult {
  LossId loss = LossId::ce;
  std::size_t trials = 0;
  double max_rel_err = 0.0;
  double mean_loss = 0.0;
  std::map<std::string, double> mean_components;
};

/// Runs `trials` seeded instances, alternating 2D and 3D grids.
GradCheckResult grad_check(LossId id, std::uint64_t seed, std::size_t trials, std::size_t classes,
                           const PairWeights& w, double step = 1e-5);

}  // namespace yseg
