#include "yseg/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace yseg::reference {

BottomHatMap bottom_hat(const InstanceLabelMap& g, std::size_t radius) {
  const auto& shape = g.shape();
  const auto ext = shape.extents3();
  const std::size_t n = g.elements();
  const auto ball = ball_offsets(shape.rank(), radius);

  std::vector<std::uint8_t> dil(n, 0);
  for (std::size_t e = 0; e < n; ++e) {
    const auto c = shape.coords3(e);
    for (const auto& o : ball) {
      const auto j = offset_index(ext, c, o);
      if (j >= 0 && g[static_cast<std::size_t>(j)] != 0) {
        dil[e] = 1;
        break;
      }
    }
  }

  BottomHatMap out(shape, 1, 0);
  for (std::size_t e = 0; e < n; ++e) {
    if (g[e] != 0 || !dil[e]) continue;
    const auto c = shape.coords3(e);
    bool closed = true;
    for (const auto& o : ball) {
      const auto j = offset_index(ext, c, o);
      if (j >= 0 && !dil[static_cast<std::size_t>(j)]) {
        closed = false;
        break;
      }
    }
    out[e] = closed;
  }
  return out;
}

SemanticLabelMap to_semantic(const InstanceLabelMap& g, const TransformConfig& cfg) {
  cfg.validate();
  const auto& shape = g.shape();
  const auto ext = shape.extents3();
  const auto r = static_cast<std::ptrdiff_t>(cfg.k);
  const std::ptrdiff_t rz = shape.rank() == 3 ? r : 0;
  const bool four = cfg.mode == ClassMode::four_class;
  BottomHatMap gaps;
  if (four) gaps = reference::bottom_hat(g, cfg.gap_radius);

  SemanticLabelMap h(shape, 1, cls::background);
  for (std::size_t e = 0; e < g.elements(); ++e) {
    if (g[e] == 0) {
      h[e] = four && gaps[e] ? cls::gap : cls::background;
      continue;
    }
    const auto c = shape.coords3(e);
    bool touching = false;
    for (std::ptrdiff_t dz = -rz; dz <= rz && !touching; ++dz)
      for (std::ptrdiff_t dy = -r; dy <= r && !touching; ++dy)
        for (std::ptrdiff_t dx = -r; dx <= r && !touching; ++dx) {
          const auto j = offset_index(ext, c, {dz, dy, dx});
          if (j < 0) continue;
          const auto v = g[static_cast<std::size_t>(j)];
          touching = v != 0 && v != g[e];
        }
    h[e] = touching ? cls::touching : cls::cell;
  }
  return h;
}

ProbabilityField softmax(const LogitField& logits) {
  ProbabilityField z(logits.shape(), logits.channels(), 0.0);
  for (std::size_t e = 0; e < logits.elements(); ++e) {
    const auto t = logits.element(e);
    const double m = *std::max_element(t.begin(), t.end());
    double sum = 0.0;
    for (double v : t) sum += std::exp(v - m);
    for (std::size_t c = 0; c < t.size(); ++c) z.at(e, c) = std::exp(t[c] - m) / sum;
  }
  return z;
}

double loss_value(LossId id, const ProbabilityField& y, const ProbabilityField& z, const PairWeights& w) {
  const std::size_t n = y.elements(), ch = y.channels();
  const double eps = kLogClamp;
  std::vector<double> count(ch, 0.0);
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t l = 0; l < ch; ++l) count[l] += y.at(e, l);

  auto ce = [&](const std::vector<double>& weight) {
    double s = 0.0;
    for (std::size_t e = 0; e < n; ++e)
      for (std::size_t l = 0; l < ch; ++l) s += weight[l] * y.at(e, l) * std::log(std::max(z.at(e, l), eps));
    return -s / static_cast<double>(n);
  };

  // Per pair: alpha = sum z_i y_i / n_i (soft TPR), beta = sum (1 - z_i) y_k / n_k
  // (soft TNR); the surrogate argument is (alpha + beta) / 2.
  auto j = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < ch; ++i)
      for (std::size_t k = 0; k < ch; ++k) {
        if (i == k || count[i] == 0.0 || count[k] == 0.0) continue;
        double alpha = 0.0, beta = 0.0;
        for (std::size_t e = 0; e < n; ++e) {
          alpha += z.at(e, i) * y.at(e, i);
          beta += (1.0 - z.at(e, i)) * y.at(e, k);
        }
        alpha /= count[i];
        beta /= count[k];
        s -= w(i, k) * std::log(std::clamp(0.5 * (alpha + beta), eps, 1.0));
      }
    return s;
  };

  const std::vector<double> ones(ch, 1.0);
  switch (id) {
    case LossId::ce: return ce(ones);
    case LossId::j: return j();
    case LossId::jc: return ce(ones) + j();
    case LossId::bwm: {
      std::vector<double> weight(ch, 0.0);
      for (std::size_t l = 0; l < ch; ++l)
        if (count[l] > 0.0) weight[l] = static_cast<double>(n) / (static_cast<double>(ch) * count[l]);
      return ce(weight);
    }
    case LossId::dsc: {
      double sum = 0.0, present = 0.0;
      for (std::size_t l = 0; l < ch; ++l) {
        if (count[l] == 0.0) continue;
        double num = 0.0, den = 0.0;
        for (std::size_t e = 0; e < n; ++e) {
          num += z.at(e, l) * y.at(e, l);
          den += z.at(e, l) * z.at(e, l) + y.at(e, l) * y.at(e, l);
        }
        sum += 2.0 * num / den;
        present += 1.0;
      }
      return ce(ones) + (present > 0.0 ? 1.0 - sum / present : 0.0);
    }
  }
  return 0.0;
}

}  // namespace yseg::reference
