#pragma once

#include <vector>

#include "yseg/grid.hpp"

namespace yseg {

/// Per-element softmax with max subtraction. Throws DataError on non-finite logits.
ProbabilityField softmax(const LogitField& logits);

/// Per-element argmax; ties resolve to the lowest channel index.
SemanticLabelMap argmax(const ProbabilityField& z);

/// One-hot encoding of a semantic map. Throws DataError when a class value is
/// not below `channels`.
ProbabilityField one_hot(const SemanticLabelMap& h, std::size_t channels);

/// Element-wise log of a strictly positive probability field, i.e. a logit
/// field whose softmax is `z`.
LogitField log_probabilities(const ProbabilityField& z);

/// Channel sums n_l of a (one-hot) field.
std::vector<double> class_counts(const ProbabilityField& y);

/// Vector-Jacobian product of the softmax: given dL/dz at z = softmax(theta),
/// returns dL/dtheta. Well defined for z with zero entries (one-hot z maps any
/// upstream gradient to zero).
LogitField softmax_backward(const ProbabilityField& z, const ProbabilityField& grad_z);

/// Deterministic Euclidean norm of all entries.
double l2_norm(const LogitField& g);

}  // namespace yseg
