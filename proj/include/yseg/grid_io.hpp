#pragma once

// GRD1 container: one JSON header line
//   {"magic":"GRD1","dims":[...],"channels":N,"dtype":"u16"|"f32","order":"C"}\n
// followed by the little-endian payload in C order, channel last.
// 2D single-channel integer maps may also be stored as binary PGM (P5,
// maxval 65535, big-endian samples). The format is picked from the file
// extension on write (".pgm" -> PGM) and sniffed from the magic on read.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "yseg/grid.hpp"

namespace yseg {

enum class IoErrorKind {
  open_failed,
  malformed_header,
  dim_mismatch,
  truncated_payload,
  trailing_data,
  dtype_mismatch,
  value_out_of_range,
};

std::string_view to_string(IoErrorKind k);

class GridIoError : public std::runtime_error {
 public:
  GridIoError(IoErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  IoErrorKind kind() const { return kind_; }

 private:
  IoErrorKind kind_;
};

enum class DType { u16, f32 };

/// Decoded file contents before conversion to a typed grid.
struct RawGrid {
  GridShape shape;
  std::size_t channels = 1;
  DType dtype = DType::u16;
  std::vector<std::uint16_t> ints;
  std::vector<float> reals;
};

RawGrid read_raw(const std::filesystem::path& path);

void write_grid(const InstanceLabelMap& g, const std::filesystem::path& path);
void write_grid(const SemanticLabelMap& h, const std::filesystem::path& path);
void write_grid(const ProbabilityField& z, const std::filesystem::path& path);
void write_grid(const LogitField& logits, const std::filesystem::path& path);

InstanceLabelMap read_instance_map(const std::filesystem::path& path);
/// Accepts values in {0,1,2,3}.
SemanticLabelMap read_semantic_map(const std::filesystem::path& path);
/// Checks every element is a simplex vector (entries in [0,1], sum within 1e-6).
ProbabilityField read_probability_field(const std::filesystem::path& path);
LogitField read_logit_field(const std::filesystem::path& path);

}  // namespace yseg
