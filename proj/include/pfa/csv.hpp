// Copyright (c) 2026 The pfa authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pfa/timeseries.hpp"

namespace pfa {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_field(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace detail

/// Reads a time series from CSV: one row per time step, columns are signal
/// components. A single header row is skipped when its first field is not
/// numeric.
inline TimeSeries read_time_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t lineno = 0;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view trimmed = detail::trim(line);
    if (trimmed.empty()) {
      if (in.peek() == EOF) break;  // trailing newline
      throw CsvError(path + ":" + std::to_string(lineno) + ": empty row");
    }
    const auto fields = detail::split_fields(trimmed);
    std::vector<double> values(fields.size());
    bool ok = true;
    for (size_t i = 0; i < fields.size(); ++i)
      if (!detail::parse_field(fields[i], values[i])) {
        ok = false;
        break;
      }
    if (!ok) {
      double probe = 0.0;
      if (first_content_row && !detail::parse_field(fields[0], probe)) {
        first_content_row = false;
        continue;  // header row
      }
      throw CsvError(path + ":" + std::to_string(lineno) + ": non-numeric field");
    }
    if (!rows.empty() && values.size() != rows.front().size())
      throw CsvError(path + ":" + std::to_string(lineno) + ": inconsistent column count");
    rows.push_back(std::move(values));
    first_content_row = false;
  }
  if (rows.size() < 2) throw CsvError(path + ": need at least two data rows");
  Matrix data(static_cast<Index>(rows.front().size()), static_cast<Index>(rows.size()));
  for (Index t = 0; t < data.cols(); ++t)
    for (Index i = 0; i < data.rows(); ++i)
      data(i, t) = rows[static_cast<size_t>(t)][static_cast<size_t>(i)];
  return TimeSeries(std::move(data));
}

/// Writes one row per time step; column_names, when given, become a header.
inline void write_time_series_csv(const std::string& path, const TimeSeries& ts,
                                  const std::vector<std::string>& column_names = {}) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot open '" + path + "' for writing");
  if (!column_names.empty()) {
    if (static_cast<Index>(column_names.size()) != ts.dim())
      throw std::invalid_argument("column name count mismatch");
    for (size_t i = 0; i < column_names.size(); ++i)
      out << (i ? "," : "") << column_names[i];
    out << '\n';
  }
  for (Index t = 0; t < ts.samples(); ++t) {
    for (Index i = 0; i < ts.dim(); ++i)
      out << (i ? "," : "") << format_double(ts.data(i, t));
    out << '\n';
  }
  if (!out) throw CsvError("write to '" + path + "' failed");
}

inline void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot open '" + path + "' for writing");
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j)
      out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
  if (!out) throw CsvError("write to '" + path + "' failed");
}

}  // namespace pfa
