#pragma once

// Serial, deliberately naive versions of the parallel kernels. They share no
// code with the optimized paths and serve as test oracles and benchmark
// baselines.

#include "yseg/grid.hpp"
#include "yseg/label_transform.hpp"
#include "yseg/losses.hpp"

namespace yseg::reference {

/// Dilation and erosion by explicit ball offsets.
BottomHatMap bottom_hat(const InstanceLabelMap& g, std::size_t radius);

/// Touching test by scanning the full (2k+1)^d window of every element.
SemanticLabelMap to_semantic(const InstanceLabelMap& g, const TransformConfig& cfg);

ProbabilityField softmax(const LogitField& logits);

/// Loss value straight from the per-pair soft rates, without gradient.
double loss_value(LossId id, const ProbabilityField& y, const ProbabilityField& z, const PairWeights& w);

}  // namespace yseg::reference
