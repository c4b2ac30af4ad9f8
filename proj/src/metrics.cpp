#include "yseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "yseg/error.hpp"

namespace yseg {

bool MetricReport::is_undefined(const std::string& name) const {
  return std::find(undefined.begin(), undefined.end(), name) != undefined.end();
}

namespace {

void put_ratio(MetricReport& r, const std::string& name, double num, double den) {
  if (den == 0.0) {
    r.values[name] = 0.0;
    r.undefined.push_back(name);
  } else {
    r.values[name] = num / den;
  }
}

}  // namespace

MetricReport binary_measures(const ConfusionCounts& c, double tversky_alpha, double tversky_beta) {
  if (c.total() == 0) throw std::invalid_argument("binary_measures: empty confusion matrix");
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);

  MetricReport r;
  put_ratio(r, "tpr", tp, tp + fn);
  put_ratio(r, "tnr", tn, tn + fp);
  r.values["j"] = r.values["tpr"] + r.values["tnr"] - 1.0;
  if (r.is_undefined("tpr") || r.is_undefined("tnr")) r.undefined.push_back("j");

  const double mcc_den = std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
  put_ratio(r, "mcc", tp * tn - fp * fn, mcc_den);
  put_ratio(r, "jaccard", tp, tp + fp + fn);
  put_ratio(r, "f1", 2.0 * tp, 2.0 * tp + fp + fn);
  put_ratio(r, "tversky", tp, tp + tversky_alpha * fn + tversky_beta * fp);
  r.values["accuracy"] = (tp + tn) / static_cast<double>(c.total());
  return r;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument(std::string("pearson: zero variance in ") + (sxx == 0.0 ? "xs" : "ys"));
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

InstanceMatching match_instances(const InstanceLabelMap& gt, const InstanceLabelMap& pred) {
  if (!(gt.shape() == pred.shape())) throw ShapeMismatch("panoptic: " + gt.shape().str() + " vs " + pred.shape().str());

  std::map<std::uint32_t, std::uint64_t> gt_area, pred_area;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> overlap;
  for (std::size_t e = 0; e < gt.elements(); ++e) {
    const std::uint32_t a = gt[e], b = pred[e];
    if (a) ++gt_area[a];
    if (b) ++pred_area[b];
    if (a && b) ++overlap[{a, b}];
  }

  InstanceMatching m;
  std::map<std::uint32_t, bool> gt_hit, pred_hit;
  for (const auto& [key, inter] : overlap) {
    const double uni = static_cast<double>(gt_area[key.first] + pred_area[key.second] - inter);
    const double iou = static_cast<double>(inter) / uni;
    if (iou > 0.5) {
      m.matches.push_back({key.first, key.second, iou});
      gt_hit[key.first] = true;
      pred_hit[key.second] = true;
    }
  }
  for (const auto& [label, area] : gt_area)
    if (!gt_hit.count(label)) m.unmatched_gt.push_back(label);
  for (const auto& [label, area] : pred_area)
    if (!pred_hit.count(label)) m.unmatched_pred.push_back(label);
  return m;
}

MetricReport panoptic(const InstanceLabelMap& gt, const InstanceLabelMap& pred) {
  const auto m = match_instances(gt, pred);
  const double tp = static_cast<double>(m.matches.size());
  const double fp = static_cast<double>(m.unmatched_pred.size());
  const double fn = static_cast<double>(m.unmatched_gt.size());
  double iou_sum = 0.0;
  for (const auto& x : m.matches) iou_sum += x.iou;

  MetricReport r;
  r.values["tp"] = tp;
  r.values["fp"] = fp;
  r.values["fn"] = fn;
  put_ratio(r, "p05", tp, tp + fp);
  put_ratio(r, "rq", tp, tp + 0.5 * fp + 0.5 * fn);
  put_ratio(r, "sq", iou_sum, tp);
  put_ratio(r, "pq", iou_sum, tp + 0.5 * fp + 0.5 * fn);
  return r;
}

}  // namespace yseg
