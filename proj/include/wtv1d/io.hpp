#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wtv1d/grid.hpp"

namespace wtv1d {

// Shortest decimal that round-trips the exact binary value.
inline std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const char* where) {
  double out = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument(std::string(where) + ": cannot parse number '" + std::string(s) + "'");
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::pair<double, double>> read_xy_csv(const std::string& path, const char* where) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(std::string(where) + ": cannot open '" + path + "'");
  std::vector<std::pair<double, double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    const auto comma = sv.find(',');
    if (comma == std::string_view::npos)
      throw std::invalid_argument(std::string(where) + ": expected two comma-separated columns");
    const std::string_view c0 = trim(sv.substr(0, comma));
    const std::string_view c1 = trim(sv.substr(comma + 1));
    if (first) {
      first = false;
      double probe;
      auto res = std::from_chars(c0.data(), c0.data() + c0.size(), probe);
      if (res.ec != std::errc{}) continue;  // header row
    }
    rows.emplace_back(parse_double(c0, where), parse_double(c1, where));
  }
  if (rows.size() < 2) throw std::invalid_argument(std::string(where) + ": need at least two rows");
  return rows;
}

}  // namespace detail

inline void write_signal_csv(const std::string& path, const Signal& s, bool header = true) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_signal_csv: cannot open '" + path + "'");
  if (header) out << "x,value\n";
  for (int j = 0; j < s.grid.n; ++j)
    out << format_double(s.grid.cell_center(j)) << ',' << format_double(s.values[j]) << '\n';
}

// One row per cell center. When no grid is supplied it is inferred from the
// x column (uniform spacing required).
inline Signal read_signal_csv(const std::string& path, std::optional<Grid> grid = std::nullopt) {
  const auto rows = detail::read_xy_csv(path, "read_signal_csv");
  const int n = static_cast<int>(rows.size());
  Grid g;
  if (grid) {
    if (grid->n != n) throw std::invalid_argument("read_signal_csv: row count does not match the grid");
    g = *grid;
  } else {
    const double h = (rows.back().first - rows.front().first) / static_cast<double>(n - 1);
    if (!(h > 0.0)) throw std::invalid_argument("read_signal_csv: x column must be increasing");
    for (int j = 0; j < n; ++j)
      if (std::abs(rows[j].first - (rows.front().first + j * h)) > 1e-6 * h * std::max(1, j))
        throw std::invalid_argument("read_signal_csv: x column is not uniformly spaced");
    g = make_grid(rows.front().first - 0.5 * h, rows.back().first + 0.5 * h, n);
  }
  std::vector<double> values(n);
  for (int j = 0; j < n; ++j) values[j] = rows[j].second;
  require_finite(values, "read_signal_csv");
  return Signal{g, std::move(values)};
}

// Node-based column (for the dual variable): n+1 rows at the grid nodes.
inline void write_nodes_csv(const std::string& path, const Grid& g, const std::vector<double>& v,
                            bool header = true) {
  if (static_cast<int>(v.size()) != g.n + 1)
    throw std::invalid_argument("write_nodes_csv: need n+1 node values");
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_nodes_csv: cannot open '" + path + "'");
  if (header) out << "x,v\n";
  for (int k = 0; k <= g.n; ++k) out << format_double(g.node(k)) << ',' << format_double(v[k]) << '\n';
}

inline std::vector<double> read_nodes_csv(const std::string& path, const Grid& g) {
  const auto rows = detail::read_xy_csv(path, "read_nodes_csv");
  if (static_cast<int>(rows.size()) != g.n + 1)
    throw std::invalid_argument("read_nodes_csv: row count does not match the grid");
  std::vector<double> v(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) v[k] = rows[k].second;
  return v;
}

}  // namespace wtv1d
