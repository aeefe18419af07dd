// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense matrix files.
//
//   CSV     RFC 4180, row-major, optional header row (detected when the first
//           record does not parse as numbers), 17 significant digits.
//   binary  "MPRJMAT1", rows and cols as little-endian u64, then rows * cols
//           little-endian IEEE-754 doubles in row-major order.
//
// The binary format is selected by a ".bin" extension.

#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "infoproj/errors.hpp"

namespace infoproj::io {

inline constexpr char kBinaryMagic[8] = {'M', 'P', 'R', 'J', 'M', 'A', 'T', '1'};

inline bool is_binary_path(const std::filesystem::path& p) { return p.extension() == ".bin"; }

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace detail {

// Splits CSV text into records of fields. Quoted fields may contain commas,
// doubled quotes and line breaks.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text,
                                                       const std::string& where) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) fail(ErrorKind::kSchema, where + ": stray quote in field");
        quoted = field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !record.empty()) {
          record.push_back(std::move(field));
          records.push_back(std::move(record));
        }
        record.clear();
        field.clear();
        field_started = false;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) fail(ErrorKind::kSchema, where + ": unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

inline bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

}  // namespace detail

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

inline Eigen::MatrixXd parse_csv_matrix(std::string_view text, const std::string& where) {
  auto records = detail::parse_csv(text, where);
  if (records.empty()) fail(ErrorKind::kSchema, where + ": no rows");
  std::size_t first = 0;
  double probe = 0.0;
  for (const auto& f : records[0]) {
    if (!detail::parse_double(f, probe)) {
      first = 1;
      break;
    }
  }
  if (first == records.size()) fail(ErrorKind::kSchema, where + ": header without data");
  const std::size_t cols = records[first].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(records.size() - first),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = first; r < records.size(); ++r) {
    if (records[r].size() != cols) {
      fail(ErrorKind::kSchema, where + ": record " + std::to_string(r + 1) + " has " +
                                   std::to_string(records[r].size()) + " fields, expected " +
                                   std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!detail::parse_double(records[r][c], v)) {
        fail(ErrorKind::kSchema, where + ": record " + std::to_string(r + 1) + " field " +
                                     std::to_string(c + 1) + " is not a number");
      }
      m(static_cast<Eigen::Index>(r - first), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return m;
}

inline std::string format_csv_matrix(const Eigen::MatrixXd& m,
                                     const std::vector<std::string>& header = {}) {
  std::string out;
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out += ',';
      out += detail::quote_field(header[c]);
    }
    out += '\n';
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

inline Eigen::MatrixXd parse_binary_matrix(std::string_view bytes, const std::string& where) {
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kBinaryMagic, 8) != 0) {
    fail(ErrorKind::kSchema, where + ": missing MPRJMAT1 header");
  }
  std::uint64_t rows = 0, cols = 0;
  std::memcpy(&rows, bytes.data() + 8, 8);
  std::memcpy(&cols, bytes.data() + 16, 8);
  rows = detail::to_little(rows);
  cols = detail::to_little(cols);
  if (rows > (1u << 31) || cols > (1u << 31) || bytes.size() != 24 + 8 * rows * cols) {
    fail(ErrorKind::kSchema, where + ": payload size does not match the header");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const char* p = bytes.data() + 24;
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c, p += 8) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, p, 8);
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          std::bit_cast<double>(detail::to_little(bits));
    }
  }
  return m;
}

inline std::string format_binary_matrix(const Eigen::MatrixXd& m) {
  std::string out(kBinaryMagic, 8);
  auto put = [&](std::uint64_t v) {
    v = detail::to_little(v);
    out.append(reinterpret_cast<const char*>(&v), 8);
  };
  put(static_cast<std::uint64_t>(m.rows()));
  put(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put(std::bit_cast<std::uint64_t>(m(r, c)));
  return out;
}

inline Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  return is_binary_path(path) ? parse_binary_matrix(text, path.string())
                              : parse_csv_matrix(text, path.string());
}

inline void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                         const std::vector<std::string>& header = {}) {
  write_text(path, is_binary_path(path) ? format_binary_matrix(m) : format_csv_matrix(m, header));
}

// A single row or column, as a vector.
inline Eigen::VectorXd read_vector(const std::filesystem::path& path) {
  const Eigen::MatrixXd m = read_matrix(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  fail(ErrorKind::kSchema, path.string() + ": expected a single row or column");
}

}  // namespace infoproj::io
