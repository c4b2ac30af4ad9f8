#pragma once

#include <string_view>

#include "yseg/grid.hpp"

namespace yseg {

enum class GapMode { map3, background, dubious_threshold };
enum class Connectivity { face, full };
enum class TieBreak { lower_label, higher_label };

GapMode parse_gap_mode(std::string_view s);
Connectivity parse_connectivity(std::string_view s);
std::string_view to_string(GapMode m);
std::string_view to_string(Connectivity c);

struct PostprocessConfig {
  GapMode gap_mode = GapMode::map3;
  /// Only read in dubious_threshold mode.
  double tau = 0.1;
  Connectivity connectivity = Connectivity::face;
  TieBreak tie_break = TieBreak::lower_label;

  void validate() const;
};

/// Per-element argmax, ties to the lowest class.
SemanticLabelMap map_decision(const ProbabilityField& z);

/// Re-decides every gap element so the result only uses classes {0,1,2}.
SemanticLabelMap resolve_gaps(const SemanticLabelMap& h, const ProbabilityField& z, const PostprocessConfig& cfg);

/// Cell components get labels 1..m in raster order of their first element.
/// Touching elements are then claimed by synchronous one-step dilations of
/// the labelled set; an element reached by several labels in the same step
/// takes the lower (or higher) one. Touching elements never reached become
/// background.
InstanceLabelMap to_instances(const SemanticLabelMap& h3, const PostprocessConfig& cfg);

InstanceLabelMap postprocess(const ProbabilityField& z, const PostprocessConfig& cfg);

}  // namespace yseg
