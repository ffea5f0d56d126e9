#pragma once

// Output files.
//
// CSV: '#'-prefixed header lines, then one column-name line, then rows.
// Numbers are written with %.17g so they round-trip exactly.
//
//   # qam-format 1
//   # code-version 0.1.0
//   # experiment <name>
//   # seed <u64>
//   # config <canonical JSON on one line>
//   # <free key> <value>          (optional, file specific)
//
// Binary grid (.qgrid), all integers and floats little-endian:
//
//   offset  size  field
//   0       8     magic "QAMGRID1"
//   8       4     u32 format version (1)
//   12      4     u32 header length H in bytes
//   16      H     UTF-8 JSON header (same content as the CSV header lines)
//   16+H    8     u64 rows
//   24+H    8     u64 cols
//   32+H    8     f64 x0   (first column coordinate)
//   40+H    8     f64 dx
//   48+H    8     f64 y0   (first row coordinate)
//   56+H    8     f64 dy
//   64+H    8*rows*cols  f64 data, row-major

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qam/errors.hpp"
#include "qam/husimi.hpp"

namespace qam::cli {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct FileHeader {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string config;  ///< canonical JSON
  std::vector<std::pair<std::string, std::string>> extra;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["format"] = kFormatVersion;
    j["code_version"] = kCodeVersion;
    j["experiment"] = experiment;
    j["seed"] = seed;
    j["config"] = nlohmann::json::parse(config);
    for (const auto& [k, v] : extra) j["extra"][k] = v;
    return j;
  }
};

class CsvWriter {
 public:
  CsvWriter(const FileHeader& h, const std::vector<std::string>& columns) {
    os_ << "# qam-format " << kFormatVersion << "\n";
    os_ << "# code-version " << kCodeVersion << "\n";
    os_ << "# experiment " << h.experiment << "\n";
    os_ << "# seed " << h.seed << "\n";
    os_ << "# config " << h.config << "\n";
    for (const auto& [k, v] : h.extra) os_ << "# " << k << " " << v << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
    os_ << "\n";
    ncol_ = columns.size();
  }

  /// Row of already-formatted cells.
  void row(const std::vector<std::string>& cells) {
    if (cells.size() != ncol_) throw InvalidArgument("CSV row has the wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }

  void row(const std::vector<double>& v) {
    std::vector<std::string> c;
    c.reserve(v.size());
    for (double x : v) c.push_back(fmt_double(x));
    row(c);
  }

  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
  std::size_t ncol_ = 0;
};

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write to '" + path + "' failed");
}

namespace detail {

template <class T>
void put_le(std::string& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("grid file truncated");
  unsigned char b[sizeof(T)];
  std::memcpy(b, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace detail

inline std::string encode_grid(const qkp::Grid2D& g, const nlohmann::json& header) {
  if (g.data.size() != g.rows * g.cols) throw InvalidArgument("grid data does not match its shape");
  const std::string h = header.dump();
  std::string out = "QAMGRID1";
  detail::put_le<std::uint32_t>(out, kFormatVersion);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(h.size()));
  out += h;
  detail::put_le<std::uint64_t>(out, g.rows);
  detail::put_le<std::uint64_t>(out, g.cols);
  detail::put_le<double>(out, g.x0);
  detail::put_le<double>(out, g.dx);
  detail::put_le<double>(out, g.y0);
  detail::put_le<double>(out, g.dy);
  for (double x : g.data) detail::put_le<double>(out, x);
  return out;
}

struct DecodedGrid {
  nlohmann::json header;
  qkp::Grid2D grid;
};

inline DecodedGrid decode_grid(const std::string& bytes) {
  if (bytes.size() < 16 || bytes.compare(0, 8, "QAMGRID1") != 0) throw IoError("not a QAMGRID1 file");
  std::size_t pos = 8;
  const auto version = detail::get_le<std::uint32_t>(bytes, pos);
  if (version != static_cast<std::uint32_t>(kFormatVersion))
    throw IoError("unsupported grid format version " + std::to_string(version));
  const auto hl = detail::get_le<std::uint32_t>(bytes, pos);
  if (pos + hl > bytes.size()) throw IoError("grid file truncated");
  DecodedGrid d;
  try {
    d.header = nlohmann::json::parse(bytes.substr(pos, hl));
  } catch (const nlohmann::json::exception&) {
    throw IoError("grid header is not valid JSON");
  }
  pos += hl;
  d.grid.rows = detail::get_le<std::uint64_t>(bytes, pos);
  d.grid.cols = detail::get_le<std::uint64_t>(bytes, pos);
  d.grid.x0 = detail::get_le<double>(bytes, pos);
  d.grid.dx = detail::get_le<double>(bytes, pos);
  d.grid.y0 = detail::get_le<double>(bytes, pos);
  d.grid.dy = detail::get_le<double>(bytes, pos);
  const std::size_t n = d.grid.rows * d.grid.cols;
  if (bytes.size() - pos != 8 * n) throw IoError("grid payload size does not match its shape");
  d.grid.data.resize(n);
  for (auto& x : d.grid.data) x = detail::get_le<double>(bytes, pos);
  return d;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("read from '" + path + "' failed");
  return ss.str();
}

}  // namespace qam::cli
