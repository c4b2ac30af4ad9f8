#include "yseg/postprocess.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "yseg/parallel.hpp"
#include "yseg/softmax.hpp"

namespace yseg {

GapMode parse_gap_mode(std::string_view s) {
  if (s == "map3") return GapMode::map3;
  if (s == "background") return GapMode::background;
  if (s == "dubious" || s == "dubious-threshold") return GapMode::dubious_threshold;
  throw std::invalid_argument("unknown gap mode '" + std::string(s) + "'");
}

Connectivity parse_connectivity(std::string_view s) {
  if (s == "face") return Connectivity::face;
  if (s == "full") return Connectivity::full;
  throw std::invalid_argument("unknown connectivity '" + std::string(s) + "'");
}

std::string_view to_string(GapMode m) {
  switch (m) {
    case GapMode::map3: return "map3";
    case GapMode::background: return "background";
    case GapMode::dubious_threshold: return "dubious-threshold";
  }
  return "?";
}

std::string_view to_string(Connectivity c) { return c == Connectivity::face ? "face" : "full"; }

void PostprocessConfig::validate() const {
  if (gap_mode == GapMode::dubious_threshold && !(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("postprocess: tau must lie in (0, 1)");
}

SemanticLabelMap map_decision(const ProbabilityField& z) { return argmax(z); }

namespace {

std::uint8_t argmax3(std::span<const double> p) {
  std::uint8_t best = 0;
  for (std::uint8_t c = 1; c < 3; ++c)
    if (p[c] > p[best]) best = c;
  return best;
}

}  // namespace

SemanticLabelMap resolve_gaps(const SemanticLabelMap& h, const ProbabilityField& z, const PostprocessConfig& cfg) {
  cfg.validate();
  if (!(h.shape() == z.shape())) throw ShapeMismatch("resolve_gaps: " + h.shape().str() + " vs " + z.shape().str());
  SemanticLabelMap out = h;
  if (z.channels() < 4) return out;
  parallel::for_each(h.elements(), [&](std::size_t e) {
    if (h[e] != cls::gap) return;
    const auto p = z.element(e);
    switch (cfg.gap_mode) {
      case GapMode::map3:
        out[e] = argmax3(p);
        break;
      case GapMode::background:
        out[e] = cls::background;
        break;
      case GapMode::dubious_threshold: {
        std::array<double, 3> v{p[0], p[1], p[2]};
        std::sort(v.begin(), v.end());
        out[e] = v[2] - v[1] < cfg.tau ? argmax3(p) : cls::background;
        break;
      }
    }
  });
  return out;
}

InstanceLabelMap to_instances(const SemanticLabelMap& h3, const PostprocessConfig& cfg) {
  const auto& shape = h3.shape();
  const auto ext = shape.extents3();
  const std::size_t n = h3.elements();
  const auto nbrs = neighbour_offsets(shape.rank(), cfg.connectivity == Connectivity::full);
  InstanceLabelMap g(shape, 1, 0u);

  std::uint32_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (h3[s] != cls::cell || g[s] != 0) continue;
    g[s] = ++next;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t e = stack.back();
      stack.pop_back();
      const auto c = shape.coords3(e);
      for (const auto& o : nbrs) {
        const auto j = offset_index(ext, c, o);
        if (j < 0) continue;
        const auto u = static_cast<std::size_t>(j);
        if (h3[u] == cls::cell && g[u] == 0) {
          g[u] = next;
          stack.push_back(u);
        }
      }
    }
  }

  std::vector<std::size_t> pending;
  for (std::size_t e = 0; e < n; ++e)
    if (h3[e] == cls::touching) pending.push_back(e);

  const bool lower = cfg.tie_break == TieBreak::lower_label;
  std::vector<std::uint32_t> claim(pending.size());
  while (!pending.empty()) {
    parallel::for_each(pending.size(), [&](std::size_t i) {
      const auto c = shape.coords3(pending[i]);
      std::uint32_t best = 0;
      for (const auto& o : nbrs) {
        const auto j = offset_index(ext, c, o);
        if (j < 0) continue;
        const std::uint32_t l = g[static_cast<std::size_t>(j)];
        if (l == 0) continue;
        if (best == 0 || (lower ? l < best : l > best)) best = l;
      }
      claim[i] = best;
    });
    std::size_t kept = 0;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (claim[i]) {
        g[pending[i]] = claim[i];
      } else {
        pending[kept++] = pending[i];
      }
    }
    if (kept == pending.size()) break;
    pending.resize(kept);
  }
  return g;
}

InstanceLabelMap postprocess(const ProbabilityField& z, const PostprocessConfig& cfg) {
  return to_instances(resolve_gaps(map_decision(z), z, cfg), cfg);
}

}  // namespace yseg
