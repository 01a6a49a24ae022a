/*! @file io.hpp
 *  @brief Tensor/mask binary formats, PPM image codec, and CSV traces.
 *
 *  Binary layout (all little-endian regardless of host):
 *    tensor file: "TNSR" | version u32 = 1 | order u32 | extents u64[order] | f64 payload
 *    mask file:   "MSK1" | same header     | u8 payload (0 = missing, 1 = observed)
 *  Payloads are stored first-index-fastest, matching DenseTensor memory.
 */

#pragma once

#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "ringfill/mask.hpp"
#include "ringfill/solver.hpp"
#include "ringfill/tensor.hpp"

namespace ringfill {

namespace detail {

inline void append_u32_le(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline void append_u64_le(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline std::uint32_t load_u32_le(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

inline std::uint64_t load_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

//! Reads exactly n bytes or throws a truncation error naming the file.
inline void read_exact(std::istream& is, const std::string& path, unsigned char* dst,
                       std::size_t n) {
  is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw std::runtime_error(path + ": unexpected end of file");
}

struct Header {
  Shape shape;
  std::size_t total = 0;
};

inline Header read_header(std::istream& is, const std::string& path, const char* magic) {
  unsigned char buf[8];
  read_exact(is, path, buf, 4);
  if (std::memcmp(buf, magic, 4) != 0)
    throw std::runtime_error(path + ": bad magic, expected \"" + magic + "\"");
  read_exact(is, path, buf, 4);
  const std::uint32_t version = load_u32_le(buf);
  if (version != 1)
    throw std::runtime_error(path + ": unsupported version " + std::to_string(version));
  read_exact(is, path, buf, 4);
  const std::uint32_t order = load_u32_le(buf);
  if (order == 0) throw std::runtime_error(path + ": tensor order must be positive");

  Header h;
  h.shape.reserve(order);
  for (std::uint32_t k = 0; k < order; ++k) {
    read_exact(is, path, buf, 8);
    const std::uint64_t e = load_u64_le(buf);
    const std::size_t extent = static_cast<std::size_t>(e);
    if (e == 0 || static_cast<std::uint64_t>(extent) != e)
      throw std::runtime_error(path + ": invalid extent in header");
    h.shape.push_back(extent);
  }
  try {
    h.total = shape_product(h.shape);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return h;
}

//! Rejects payload-size mismatches before anything is allocated.
inline void check_payload(std::istream& is, const std::string& path, std::size_t bytes) {
  const std::streampos here = is.tellg();
  is.seekg(0, std::ios::end);
  const std::streampos end = is.tellg();
  is.seekg(here);
  if (here < 0 || end < 0 || static_cast<std::uint64_t>(end - here) != bytes)
    throw std::runtime_error(path + ": payload size does not match header");
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error(path + ": cannot open for reading");
  return is;
}

inline void write_all(const std::string& path, const std::vector<unsigned char>& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error(path + ": cannot open for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw std::runtime_error(path + ": write failed");
}

inline std::vector<unsigned char> header_bytes(const char* magic, const Shape& shape) {
  std::vector<unsigned char> out(magic, magic + 4);
  append_u32_le(out, 1u);
  append_u32_le(out, static_cast<std::uint32_t>(shape.size()));
  for (std::size_t e : shape) append_u64_le(out, static_cast<std::uint64_t>(e));
  return out;
}

}  // namespace detail

inline void write_tensor(const DenseTensor& t, const std::string& path) {
  std::vector<unsigned char> bytes = detail::header_bytes("TNSR", t.shape());
  bytes.reserve(bytes.size() + 8 * t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    detail::append_u64_le(bytes, std::bit_cast<std::uint64_t>(t[i]));
  detail::write_all(path, bytes);
}

inline DenseTensor read_tensor(const std::string& path) {
  std::ifstream is = detail::open_input(path);
  const detail::Header h = detail::read_header(is, path, "TNSR");
  detail::check_payload(is, path, 8 * h.total);

  std::vector<unsigned char> raw(8 * h.total);
  detail::read_exact(is, path, raw.data(), raw.size());
  std::vector<double> values(h.total);
  for (std::size_t i = 0; i < h.total; ++i)
    values[i] = std::bit_cast<double>(detail::load_u64_le(raw.data() + 8 * i));
  try {
    return DenseTensor(h.shape, std::move(values));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

inline void write_mask(const ObservationMask& m, const std::string& path) {
  std::vector<unsigned char> bytes = detail::header_bytes("MSK1", m.shape());
  bytes.insert(bytes.end(), m.flags().begin(), m.flags().end());
  detail::write_all(path, bytes);
}

inline ObservationMask read_mask(const std::string& path) {
  std::ifstream is = detail::open_input(path);
  const detail::Header h = detail::read_header(is, path, "MSK1");
  detail::check_payload(is, path, h.total);

  std::vector<std::uint8_t> flags(h.total);
  detail::read_exact(is, path, flags.data(), flags.size());
  try {
    return ObservationMask(h.shape, std::move(flags));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

namespace detail {

//! One whitespace-delimited PPM header token, skipping '#' comment lines.
inline std::string ppm_token(std::istream& is, const std::string& path) {
  int c = is.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = is.get();
    } else if (std::isspace(c)) {
      c = is.get();
    } else {
      break;
    }
  }
  if (c == EOF) throw std::runtime_error(path + ": truncated image header");
  std::string token;
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = is.get();
  }
  return token;
}

inline std::size_t ppm_number(std::istream& is, const std::string& path, const char* what) {
  const std::string token = ppm_token(is, path);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || value == 0)
    throw std::runtime_error(path + ": invalid " + what + " \"" + token + "\" in image header");
  return value;
}

}  // namespace detail

//! Binary P6 with maxval 255 only; rows map to the first tensor mode,
//! columns to the second, RGB channels to the third.
inline DenseTensor read_ppm(const std::string& path) {
  std::ifstream is = detail::open_input(path);
  const std::string magic = detail::ppm_token(is, path);
  if (magic != "P6")
    throw std::runtime_error(path + ": expected binary P6 image, got \"" + magic + "\"");
  const std::size_t width = detail::ppm_number(is, path, "width");
  const std::size_t height = detail::ppm_number(is, path, "height");
  const std::size_t maxval = detail::ppm_number(is, path, "maxval");
  if (maxval != 255)
    throw std::runtime_error(path + ": only maxval 255 supported, got " +
                             std::to_string(maxval));
  // The header terminates with exactly one whitespace byte (already consumed
  // by the token reader); pixel bytes follow immediately.
  std::vector<unsigned char> raw(3 * width * height);
  detail::read_exact(is, path, raw.data(), raw.size());

  DenseTensor img({height, width, 3});
  std::size_t p = 0;
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x)
      for (std::size_t c = 0; c < 3; ++c)
        img[y + height * (x + width * c)] = static_cast<double>(raw[p++]);
  return img;
}

inline void write_ppm(const DenseTensor& img, const std::string& path) {
  if (img.order() != 3 || img.extent(2) != 3)
    throw std::invalid_argument("write_ppm: expected an HxWx3 tensor, got " +
                                format_shape(img.shape()));
  const std::size_t height = img.extent(0);
  const std::size_t width = img.extent(1);

  std::string header = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  std::vector<unsigned char> bytes(header.begin(), header.end());
  bytes.reserve(bytes.size() + 3 * width * height);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x)
      for (std::size_t c = 0; c < 3; ++c) {
        double v = img[y + height * (x + width * c)];
        v = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
        bytes.push_back(static_cast<unsigned char>(v + 0.5));  // round half up
      }
  detail::write_all(path, bytes);
}

//! Shortest decimal that still round-trips: 17 significant digits.
inline std::string csv_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("csv_double: formatting failed");
  return std::string(buf, ptr);
}

inline void write_history_csv(const std::vector<HistoryRecord>& history,
                              const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error(path + ": cannot open for writing");
  os << "k,lagrangian,objective,rel_change,mu\n";
  for (const HistoryRecord& r : history)
    os << r.k << ',' << csv_double(r.lagrangian) << ',' << csv_double(r.objective) << ','
       << csv_double(r.rel_change) << ',' << csv_double(r.mu) << '\n';
  if (!os) throw std::runtime_error(path + ": write failed");
}

inline void write_history_csv(const SolveResult& result, const std::string& path) {
  write_history_csv(result.history, path);
}

}  // namespace ringfill
