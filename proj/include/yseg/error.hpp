#pragma once

#include <stdexcept>
#include <string>

namespace yseg {

/// Raised when input data (as opposed to configuration) cannot be processed:
/// shape mismatches, non-finite values, malformed targets.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace yseg
