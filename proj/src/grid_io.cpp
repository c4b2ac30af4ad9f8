#include "yseg/grid_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace yseg {

std::string_view to_string(IoErrorKind k) {
  switch (k) {
    case IoErrorKind::open_failed: return "open failed";
    case IoErrorKind::malformed_header: return "malformed header";
    case IoErrorKind::dim_mismatch: return "dim mismatch";
    case IoErrorKind::truncated_payload: return "truncated payload";
    case IoErrorKind::trailing_data: return "trailing data";
    case IoErrorKind::dtype_mismatch: return "dtype mismatch";
    case IoErrorKind::value_out_of_range: return "value out of range";
  }
  return "unknown";
}

namespace {

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GridIoError(IoErrorKind::open_failed, path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, const std::string& header, const std::vector<unsigned char>& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw GridIoError(IoErrorKind::open_failed, path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw GridIoError(IoErrorKind::open_failed, "write failed: " + path.string());
}

bool is_pgm_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext == ".pgm";
}

std::string grd1_header(const GridShape& shape, std::size_t channels, DType dtype) {
  nlohmann::ordered_json h;
  h["magic"] = "GRD1";
  h["dims"] = shape.dims();
  h["channels"] = channels;
  h["dtype"] = dtype == DType::u16 ? "u16" : "f32";
  h["order"] = "C";
  return h.dump() + "\n";
}

std::vector<unsigned char> encode_u16(std::span<const std::uint16_t> v, bool big_endian) {
  std::vector<unsigned char> out(v.size() * 2);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const unsigned char lo = static_cast<unsigned char>(v[i] & 0xff);
    const unsigned char hi = static_cast<unsigned char>(v[i] >> 8);
    out[2 * i] = big_endian ? hi : lo;
    out[2 * i + 1] = big_endian ? lo : hi;
  }
  return out;
}

std::vector<unsigned char> encode_f32(std::span<const double> v) {
  std::vector<unsigned char> out(v.size() * 4);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const float f = static_cast<float>(v[i]);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int b = 0; b < 4; ++b) out[4 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  return out;
}

template <typename Labels>
void write_integer_grid(const Labels& g, const std::filesystem::path& path) {
  std::vector<std::uint16_t> v(g.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto x = g.values()[i];
    if (x > std::numeric_limits<std::uint16_t>::max())
      throw GridIoError(IoErrorKind::value_out_of_range,
                        "label " + std::to_string(x) + " does not fit in u16");
    v[i] = static_cast<std::uint16_t>(x);
  }
  if (is_pgm_path(path)) {
    if (g.shape().rank() != 2 || g.channels() != 1)
      throw GridIoError(IoErrorKind::dim_mismatch, "PGM holds 2D single-channel maps only");
    std::ostringstream h;
    h << "P5\n" << g.shape().dim(1) << " " << g.shape().dim(0) << "\n65535\n";
    dump(path, h.str(), encode_u16(v, true));
    return;
  }
  dump(path, grd1_header(g.shape(), g.channels(), DType::u16), encode_u16(v, false));
}

template <typename Field>
void write_real_grid(const Field& z, const std::filesystem::path& path) {
  if (is_pgm_path(path)) throw GridIoError(IoErrorKind::dtype_mismatch, "PGM cannot hold real grids");
  dump(path, grd1_header(z.shape(), z.channels(), DType::f32), encode_f32(z.values()));
}

// PGM tokens are separated by whitespace; '#' starts a comment to end of line.
std::size_t pgm_token(const std::vector<char>& bytes, std::size_t& pos) {
  for (;;) {
    if (pos >= bytes.size()) throw GridIoError(IoErrorKind::malformed_header, "PGM header ended early");
    const char ch = bytes[pos];
    if (ch == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      ++pos;
    } else {
      break;
    }
  }
  std::size_t value = 0;
  const std::size_t start = pos;
  while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    value = value * 10 + static_cast<std::size_t>(bytes[pos] - '0');
    if (value > (1u << 30)) throw GridIoError(IoErrorKind::malformed_header, "PGM field too large");
    ++pos;
  }
  if (pos == start) throw GridIoError(IoErrorKind::malformed_header, "PGM header expects an integer");
  return value;
}

RawGrid read_pgm(const std::vector<char>& bytes) {
  std::size_t pos = 2;
  const std::size_t width = pgm_token(bytes, pos);
  const std::size_t height = pgm_token(bytes, pos);
  const std::size_t maxval = pgm_token(bytes, pos);
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
    throw GridIoError(IoErrorKind::malformed_header, "PGM maxval must be followed by whitespace");
  ++pos;
  if (width == 0 || height == 0) throw GridIoError(IoErrorKind::dim_mismatch, "PGM with zero extent");
  if (maxval == 0 || maxval > 65535) throw GridIoError(IoErrorKind::malformed_header, "PGM maxval out of range");
  const std::size_t bpp = maxval < 256 ? 1 : 2;
  const std::size_t n = width * height;
  const std::size_t have = bytes.size() - pos;
  if (have < n * bpp) throw GridIoError(IoErrorKind::truncated_payload, "PGM payload too short");
  if (have > n * bpp) throw GridIoError(IoErrorKind::trailing_data, "bytes after PGM payload");

  RawGrid raw{GridShape({height, width}), 1, DType::u16, {}, {}};
  raw.ints.resize(n);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::size_t i = 0; i < n; ++i)
    raw.ints[i] = bpp == 1 ? p[i] : static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]);
  return raw;
}

RawGrid read_grd1(const std::vector<char>& bytes) {
  const auto nl = std::find(bytes.begin(), bytes.end(), '\n');
  if (nl == bytes.end()) throw GridIoError(IoErrorKind::malformed_header, "header line not terminated");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(bytes.begin(), nl);
  } catch (const nlohmann::json::exception& e) {
    throw GridIoError(IoErrorKind::malformed_header, e.what());
  }
  if (!h.is_object() || h.value("magic", "") != "GRD1")
    throw GridIoError(IoErrorKind::malformed_header, "missing GRD1 magic");
  if (h.value("order", "C") != "C") throw GridIoError(IoErrorKind::malformed_header, "only C order is supported");
  if (!h.contains("dims") || !h["dims"].is_array())
    throw GridIoError(IoErrorKind::malformed_header, "dims must be an array");
  std::vector<std::size_t> dims;
  for (const auto& d : h["dims"]) {
    if (!d.is_number_unsigned() || d.get<std::size_t>() == 0)
      throw GridIoError(IoErrorKind::malformed_header, "dims must be positive integers");
    dims.push_back(d.get<std::size_t>());
  }
  if (dims.size() != 2 && dims.size() != 3)
    throw GridIoError(IoErrorKind::dim_mismatch, "expected 2 or 3 dims, header declares " + std::to_string(dims.size()));
  if (!h.contains("channels") || !h["channels"].is_number_unsigned() || h["channels"].get<std::size_t>() == 0)
    throw GridIoError(IoErrorKind::malformed_header, "channels must be a positive integer");
  const std::string dtype = h.value("dtype", "");
  if (dtype != "u16" && dtype != "f32") throw GridIoError(IoErrorKind::malformed_header, "unknown dtype '" + dtype + "'");

  RawGrid raw{GridShape(dims), h["channels"].get<std::size_t>(), dtype == "u16" ? DType::u16 : DType::f32, {}, {}};
  const std::size_t count = raw.shape.size() * raw.channels;
  const std::size_t width = raw.dtype == DType::u16 ? 2 : 4;
  const std::size_t offset = static_cast<std::size_t>(nl - bytes.begin()) + 1;
  const std::size_t have = bytes.size() - offset;
  if (have < count * width)
    throw GridIoError(IoErrorKind::truncated_payload,
                      "expected " + std::to_string(count * width) + " payload bytes, found " + std::to_string(have));
  if (have > count * width) throw GridIoError(IoErrorKind::trailing_data, "bytes after payload");

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  if (raw.dtype == DType::u16) {
    raw.ints.resize(count);
    for (std::size_t i = 0; i < count; ++i)
      raw.ints[i] = static_cast<std::uint16_t>(p[2 * i] | (p[2 * i + 1] << 8));
  } else {
    raw.reals.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(p[4 * i + b]) << (8 * b);
      std::memcpy(&raw.reals[i], &bits, 4);
    }
  }
  return raw;
}

RawGrid expect(RawGrid raw, DType dtype, const char* what) {
  if (raw.dtype != dtype)
    throw GridIoError(IoErrorKind::dtype_mismatch, std::string(what) + " must be stored as " +
                                                       (dtype == DType::u16 ? "u16" : "f32"));
  return raw;
}

}  // namespace

RawGrid read_raw(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return read_pgm(bytes);
  return read_grd1(bytes);
}

void write_grid(const InstanceLabelMap& g, const std::filesystem::path& path) { write_integer_grid(g, path); }
void write_grid(const SemanticLabelMap& h, const std::filesystem::path& path) { write_integer_grid(h, path); }
void write_grid(const ProbabilityField& z, const std::filesystem::path& path) { write_real_grid(z, path); }
void write_grid(const LogitField& logits, const std::filesystem::path& path) { write_real_grid(logits, path); }

InstanceLabelMap read_instance_map(const std::filesystem::path& path) {
  auto raw = expect(read_raw(path), DType::u16, "instance map");
  if (raw.channels != 1) throw GridIoError(IoErrorKind::dim_mismatch, "instance map must have one channel");
  return InstanceLabelMap(raw.shape, 1, std::vector<std::uint32_t>(raw.ints.begin(), raw.ints.end()));
}

SemanticLabelMap read_semantic_map(const std::filesystem::path& path) {
  auto raw = expect(read_raw(path), DType::u16, "semantic map");
  if (raw.channels != 1) throw GridIoError(IoErrorKind::dim_mismatch, "semantic map must have one channel");
  std::vector<std::uint8_t> v(raw.ints.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (raw.ints[i] > cls::gap)
      throw GridIoError(IoErrorKind::value_out_of_range, "semantic class " + std::to_string(raw.ints[i]));
    v[i] = static_cast<std::uint8_t>(raw.ints[i]);
  }
  return SemanticLabelMap(raw.shape, 1, std::move(v));
}

ProbabilityField read_probability_field(const std::filesystem::path& path) {
  auto raw = expect(read_raw(path), DType::f32, "probability field");
  ProbabilityField z(raw.shape, raw.channels, std::vector<double>(raw.reals.begin(), raw.reals.end()));
  for (std::size_t e = 0; e < z.elements(); ++e) {
    double sum = 0.0;
    for (double v : z.element(e)) {
      if (!(v >= 0.0 && v <= 1.0))
        throw GridIoError(IoErrorKind::value_out_of_range, "probability outside [0,1] at element " + std::to_string(e));
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw GridIoError(IoErrorKind::value_out_of_range, "probabilities do not sum to 1 at element " + std::to_string(e));
  }
  return z;
}

LogitField read_logit_field(const std::filesystem::path& path) {
  auto raw = expect(read_raw(path), DType::f32, "logit field");
  for (float v : raw.reals)
    if (!std::isfinite(v)) throw GridIoError(IoErrorKind::value_out_of_range, "non-finite logit");
  return LogitField(raw.shape, raw.channels, std::vector<double>(raw.reals.begin(), raw.reals.end()));
}

}  // namespace yseg
