#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "yseg/grid.hpp"

namespace yseg {

struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::uint64_t total() const { return tp + fp + fn + tn; }
};

/// Named measures. A measure whose denominator is zero is reported as 0 and
/// listed in `undefined`.
struct MetricReport {
  std::map<std::string, double> values;
  std::vector<std::string> undefined;
  std::map<std::string, std::string> metadata;

  double at(const std::string& name) const { return values.at(name); }
  bool is_undefined(const std::string& name) const;
};

/// J, MCC, Jaccard, F1, Tversky and Accuracy (plus TPR/TNR). Tversky is
/// tp / (tp + alpha*fn + beta*fp). Throws std::invalid_argument on an empty
/// confusion matrix.
MetricReport binary_measures(const ConfusionCounts& c, double tversky_alpha = 0.5, double tversky_beta = 0.5);

/// Sample Pearson correlation. Throws std::invalid_argument for unequal
/// lengths, fewer than two points or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct InstanceMatch {
  std::uint32_t gt = 0;
  std::uint32_t pred = 0;
  double iou = 0.0;
};

struct InstanceMatching {
  std::vector<InstanceMatch> matches;  // sorted by gt label
  std::vector<std::uint32_t> unmatched_gt;
  std::vector<std::uint32_t> unmatched_pred;
};

/// Pairs with IoU > 0.5; such pairs are necessarily unique per label.
InstanceMatching match_instances(const InstanceLabelMap& gt, const InstanceLabelMap& pred);

/// P05, RQ, SQ, PQ (and tp/fp/fn counts) for one image; label 0 is ignored.
MetricReport panoptic(const InstanceLabelMap& gt, const InstanceLabelMap& pred);

}  // namespace yseg
