#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "yseg/grid.hpp"
#include "yseg/label_transform.hpp"
#include "yseg/losses.hpp"
#include "yseg/metrics.hpp"
#include "yseg/scene.hpp"

namespace yseg {

// ---------------------------------------------------------------------------
// Random classifiers under class imbalance.

/// C1 predicts positive with probability pi (the ground-truth rate), C3 with
/// probability 1/2.
enum class ClassifierKind { c1, c3 };

ClassifierKind parse_classifier(std::string_view s);
std::string_view to_string(ClassifierKind k);

struct ImbalanceSimConfig {
  std::vector<double> pis = default_pis();
  std::size_t samples = 1000;
  std::size_t trials = 500;
  std::uint64_t seed = 0;
  ClassifierKind classifier = ClassifierKind::c1;

  void validate() const;
  /// 0.01, 0.02, ..., 0.50.
  static std::vector<double> default_pis();
};

/// Measure names in output column order.
inline constexpr std::string_view kBinaryMeasures[] = {"j", "mcc", "jaccard", "f1", "tversky", "accuracy"};

struct ImbalanceTrial {
  double pi = 0.0;
  std::size_t trial = 0;
  ConfusionCounts counts;
  std::array<double, 6> measures{};  // kBinaryMeasures order
};

struct ImbalanceSummary {
  double pi = 0.0;
  std::array<double, 6> mean{};
  std::array<double, 6> stddev{};
};

struct ImbalanceResult {
  std::vector<ImbalanceTrial> trials;  // pi-major, then trial
  std::vector<ImbalanceSummary> summary;
  /// Trials redrawn because the truth or the prediction had a single class.
  std::size_t resampled = 0;
  ClassifierKind classifier = ClassifierKind::c1;
};

/// Each (pi, trial) draws from its own seeded stream, so results do not
/// depend on the number of threads.
ImbalanceResult run_imbalance_sim(const ImbalanceSimConfig& cfg);

struct CorrelationPoint {
  double pi = 0.0;
  double r = 0.0;
};

/// Settings used for the MCC/J scatter: C3, N = 400, T = 500, pi in
/// {0.01, 0.25, 0.5}.
ImbalanceSimConfig correlation_defaults();

/// Pearson r between per-trial MCC and J for every pi. Requires C3.
std::vector<CorrelationPoint> mcc_j_correlation(const ImbalanceResult& result);
std::vector<CorrelationPoint> mcc_j_correlation(const ImbalanceSimConfig& cfg);

// ---------------------------------------------------------------------------
// Prescribed shrinking trajectory.

/// The prescribed segmentation starts as the cells dilated by
/// `initial_margin`, shrinking by one element every `iterations_per_margin`
/// steps while the confidence rises linearly from `initial_confidence` to
/// `final_confidence`. Once the margin is 0 (the shrinkwrap iteration), the
/// field moves linearly over `ramp_iterations` steps to the exact one-hot
/// ground truth and stays there.
struct ShrinkwrapConfig {
  SceneSpec scene{};
  TransformConfig transform{};
  std::size_t initial_margin = 6;
  std::size_t iterations_per_margin = 8;
  double initial_confidence = 0.55;
  double final_confidence = 0.95;
  std::size_t ramp_iterations = 40;
  /// 0 picks the shortest run that reaches the end of the ramp plus one
  /// step at the optimum.
  std::size_t iterations = 0;

  void validate() const;
  std::size_t shrinkwrap_iteration() const { return initial_margin * iterations_per_margin; }
  std::size_t resolved_iterations() const;
};

struct ShrinkwrapRecord {
  std::size_t iteration = 0;
  std::size_t margin = 0;
  double confidence = 0.0;
  /// Progress of the final ramp in [0, 1]; 0 before the shrinkwrap point.
  double ramp = 0.0;
  double grad_ce = 0.0;
  double grad_j = 0.0;
  double grad_jc = 0.0;
};

struct ShrinkwrapResult {
  std::vector<ShrinkwrapRecord> records;
  std::size_t shrinkwrap_iteration = 0;
};

/// The prescribed field at one iteration (exposed for tests).
ProbabilityField shrinkwrap_field(const InstanceLabelMap& g, const SemanticLabelMap& h, std::size_t channels,
                                  std::size_t margin, double confidence, double ramp);

ShrinkwrapResult run_shrinkwrap(const ShrinkwrapConfig& cfg, const PairWeights& w);

// ---------------------------------------------------------------------------
// Two-direction loss landscape.

struct LandscapeConfig {
  LossId loss = LossId::jc;
  std::uint64_t seed = 0;
  std::size_t resolution = 21;
  double span = 1.0;

  void validate() const;
};

struct LandscapeResult {
  std::vector<double> coords;  // a (and b) sample positions
  std::vector<double> values;  // row-major, row = a index
  std::vector<std::uint8_t> non_finite;
  std::size_t resolution = 0;
  double at(std::size_t ia, std::size_t ib) const { return values[ia * resolution + ib]; }
};

/// Logits whose softmax is close to the one-hot `y`: +margin on the true
/// class, 0 elsewhere.
LogitField optimal_logits(const ProbabilityField& y, double margin = 8.0);

LandscapeResult landscape_scan(const LandscapeConfig& cfg, const ProbabilityField& y, const LogitField& theta_star,
                               const PairWeights& w);

}  // namespace yseg
