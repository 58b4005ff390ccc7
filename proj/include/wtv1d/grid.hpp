#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace wtv1d {

inline int sgn(double x) { return (x > 0.0) - (x < 0.0); }

// Uniform partition of the interval (a, b) into n cells of width h.
// Cell centers sit at a + (j + 1/2) h for j = 0..n-1; the n-1 interior
// edges sit at a + (i + 1) h for i = 0..n-2.
struct Grid {
  double a = 0.0;
  double b = 1.0;
  int n = 2;
  double h = 0.5;

  double length() const { return b - a; }
  double cell_center(int j) const { return a + (static_cast<double>(j) + 0.5) * h; }
  double edge(int i) const { return a + static_cast<double>(i + 1) * h; }
  double node(int k) const { return a + static_cast<double>(k) * h; }
  int num_cells() const { return n; }
  int num_edges() const { return n - 1; }

  // Index of the interior edge closest to x.
  int nearest_edge(double x) const {
    int i = static_cast<int>(std::lround((x - a) / h)) - 1;
    return std::clamp(i, 0, n - 2);
  }

  friend bool operator==(const Grid&, const Grid&) = default;
};

inline Grid make_grid(double a, double b, int n) {
  if (!(a < b)) throw std::invalid_argument("make_grid: need a < b");
  if (n < 2) throw std::invalid_argument("make_grid: need n >= 2");
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("make_grid: endpoints must be finite");
  Grid g;
  g.a = a;
  g.b = b;
  g.n = n;
  g.h = (b - a) / static_cast<double>(n);
  return g;
}

// Cell-wise constant representative of a function on the grid: one value
// per cell, attached to the cell center.
struct Signal {
  Grid grid;
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
};

inline bool same_grid(const Grid& g1, const Grid& g2) {
  if (g1.n != g2.n) return false;
  const double tol = 1e-9 * (std::abs(g1.length()) + std::abs(g2.length()));
  return std::abs(g1.a - g2.a) <= tol && std::abs(g1.b - g2.b) <= tol;
}

inline void require_same_grid(const Grid& g1, const Grid& g2, const char* where) {
  if (!same_grid(g1, g2)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

inline void require_finite(const std::vector<double>& v, const char* where) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(where) + ": non-finite value");
}

template <class F>
Signal sample(const Grid& grid, F&& spec) {
  Signal s;
  s.grid = grid;
  s.values.resize(grid.n);
  for (int j = 0; j < grid.n; ++j) {
    const double y = spec(grid.cell_center(j));
    if (!std::isfinite(y)) throw std::invalid_argument("sample: spec evaluated to a non-finite value");
    s.values[j] = y;
  }
  return s;
}

inline Signal make_signal(const Grid& grid, std::vector<double> values) {
  if (static_cast<int>(values.size()) != grid.n)
    throw std::invalid_argument("make_signal: value count does not match the grid");
  require_finite(values, "make_signal");
  return Signal{grid, std::move(values)};
}

inline double min_value(const Signal& s) { return *std::min_element(s.values.begin(), s.values.end()); }
inline double max_value(const Signal& s) { return *std::max_element(s.values.begin(), s.values.end()); }
inline double value_range(const Signal& s) { return max_value(s) - min_value(s); }

inline double mean_value(const Signal& s) {
  double acc = 0.0;
  for (double v : s.values) acc += v;
  return acc / static_cast<double>(s.values.size());
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double linf_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("linf_distance: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double linf_distance(const Signal& a, const Signal& b) {
  require_same_grid(a.grid, b.grid, "linf_distance");
  return linf_distance(a.values, b.values);
}

}  // namespace wtv1d
