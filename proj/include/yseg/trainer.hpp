#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "yseg/grid.hpp"
#include "yseg/losses.hpp"
#include "yseg/postprocess.hpp"

namespace yseg {

enum class Optimizer { gd, adam };
/// Starting logits: all zeros (uniform probabilities), the shrinkwrap
/// configuration (confidence `init_confidence` on cell inside the cells and
/// on background outside), or small seeded Gaussian noise.
enum class TrainInit { zeros, shrinkwrap, random };

Optimizer parse_optimizer(std::string_view s);
TrainInit parse_train_init(std::string_view s);
std::string_view to_string(Optimizer o);
std::string_view to_string(TrainInit i);

struct TrainConfig {
  LossId loss = LossId::jc;
  /// Learning rate of either optimizer.
  double step = 1.0;
  std::size_t iterations = 5000;
  std::size_t log_period = 50;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::gd;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  TrainInit init = TrainInit::zeros;
  double init_confidence = 0.95;
  PostprocessConfig post{};

  void validate() const;
};

/// Learning rate used when Adam is picked without an explicit step.
inline constexpr double kAdamDefaultRate = 1e-4;

struct TrainRecord {
  std::size_t iteration = 0;
  double total = 0.0;
  std::map<std::string, double> components;
  /// PQ of the postprocessed prediction, only on logged iterations.
  std::optional<double> pq;
  /// Every gap-class element is predicted as gap.
  bool notch_correct = false;
};

struct TrainTrace {
  /// One record per evaluated iterate, starting with the initial logits.
  std::vector<TrainRecord> records;
  std::optional<std::size_t> first_notch_correct;
  std::optional<std::size_t> first_all_correct;
  double final_pq = 0.0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, TrainTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const TrainTrace& trace() const { return trace_; }

 private:
  TrainTrace trace_;
};

/// Gradient descent on per-element logits. `g` is the source instance map
/// (used for PQ), `y` the one-hot semantic target derived from it.
TrainTrace train(const InstanceLabelMap& g, const ProbabilityField& y, const TrainConfig& cfg, const PairWeights& w);

}  // namespace yseg
