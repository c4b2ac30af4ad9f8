#include "yseg/softmax.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "yseg/parallel.hpp"

namespace yseg {

ProbabilityField softmax(const LogitField& logits) {
  const std::size_t c = logits.channels();
  ProbabilityField z(logits.shape(), c);
  std::atomic<bool> finite{true};
  parallel::for_each(logits.elements(), [&](std::size_t e) {
    const auto in = logits.element(e);
    auto out = z.element(e);
    double peak = in[0];
    for (std::size_t l = 0; l < c; ++l) {
      if (!std::isfinite(in[l])) finite.store(false, std::memory_order_relaxed);
      peak = std::max(peak, in[l]);
    }
    double sum = 0.0;
    for (std::size_t l = 0; l < c; ++l) {
      out[l] = std::exp(in[l] - peak);
      sum += out[l];
    }
    for (std::size_t l = 0; l < c; ++l) out[l] /= sum;
  });
  if (!finite) throw DataError("softmax: non-finite logit");
  return z;
}

SemanticLabelMap argmax(const ProbabilityField& z) {
  SemanticLabelMap h(z.shape(), 1);
  parallel::for_each(z.elements(), [&](std::size_t e) {
    const auto v = z.element(e);
    std::size_t best = 0;
    for (std::size_t l = 1; l < v.size(); ++l)
      if (v[l] > v[best]) best = l;
    h[e] = static_cast<std::uint8_t>(best);
  });
  return h;
}

ProbabilityField one_hot(const SemanticLabelMap& h, std::size_t channels) {
  ProbabilityField y(h.shape(), channels, 0.0);
  for (std::size_t e = 0; e < h.elements(); ++e) {
    if (h[e] >= channels)
      throw DataError("one_hot: class " + std::to_string(h[e]) + " at element " +
                      std::to_string(e) + " is not below " + std::to_string(channels));
    y.at(e, h[e]) = 1.0;
  }
  return y;
}

LogitField log_probabilities(const ProbabilityField& z) {
  LogitField out(z.shape(), z.channels());
  const auto in = z.values();
  auto o = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!(in[i] > 0.0)) throw DataError("log_probabilities: non-positive probability");
    o[i] = std::log(in[i]);
  }
  return out;
}

std::vector<double> class_counts(const ProbabilityField& y) {
  std::vector<double> n(y.channels(), 0.0);
  parallel::blocked_accumulate(y.elements(), n, [&](std::size_t lo, std::size_t hi, std::span<double> acc) {
    for (std::size_t e = lo; e < hi; ++e) {
      const auto v = y.element(e);
      for (std::size_t l = 0; l < v.size(); ++l) acc[l] += v[l];
    }
  });
  return n;
}

LogitField softmax_backward(const ProbabilityField& z, const ProbabilityField& grad_z) {
  if (!(z.shape() == grad_z.shape()) || z.channels() != grad_z.channels())
    throw ShapeMismatch("softmax_backward: shape mismatch");
  LogitField out(z.shape(), z.channels());
  parallel::for_each(z.elements(), [&](std::size_t e) {
    const auto p = z.element(e);
    const auto g = grad_z.element(e);
    auto o = out.element(e);
    double dot = 0.0;
    for (std::size_t l = 0; l < p.size(); ++l) dot += p[l] * g[l];
    for (std::size_t l = 0; l < p.size(); ++l) o[l] = p[l] * (g[l] - dot);
  });
  return out;
}

double l2_norm(const LogitField& g) {
  const auto v = g.values();
  return std::sqrt(parallel::blocked_sum(v.size(), [&](std::size_t i) { return v[i] * v[i]; }));
}

}  // namespace yseg
