#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "amh/error.hpp"

namespace amh::csv {

/// 17 significant digits: parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return res.ec == std::errc() && res.ptr == cell.data() + cell.size();
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

/// Numeric table: rows of equal width plus the optional header names.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_numbers;  // source line of each row

  std::size_t columns() const noexcept {
    return !rows.empty() ? rows.front().size() : header.size();
  }
};

/**
 * Reads comma-separated numeric text. The first non-blank line is treated as
 * a header when any of its cells is not a number; every later line must be
 * fully numeric, finite, and as wide as the first.
 */
inline Table read_table(std::istream& in) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto cells = split(view);
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!parse_double(cells[i], values[i])) {
        numeric = false;
        break;
      }
    }
    if (first) {
      first = false;
      width = cells.size();
      if (!numeric) {
        for (auto c : cells) t.header.emplace_back(trim(c));
        continue;
      }
    }
    if (!numeric) {
      throw data_error("non-numeric cell", lineno);
    }
    if (cells.size() != width) {
      throw data_error("expected " + std::to_string(width) + " columns, found " +
                           std::to_string(cells.size()),
                       lineno);
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw data_error("non-finite value", lineno);
    }
    t.rows.push_back(std::move(values));
    t.line_numbers.push_back(lineno);
  }
  return t;
}

inline Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");
  return read_table(in);
}

}  // namespace amh::csv
