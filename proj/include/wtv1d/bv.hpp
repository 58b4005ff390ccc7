#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "wtv1d/grid.hpp"
#include "wtv1d/weights.hpp"

namespace wtv1d {

// Discrete derivative measure: d_i = u_{i+1} - u_i on interior edges.
inline std::vector<double> edge_differences(const Signal& u) {
  std::vector<double> d(u.grid.num_edges());
  for (int i = 0; i < u.grid.num_edges(); ++i) d[i] = u.values[i + 1] - u.values[i];
  return d;
}

inline double total_variation(const Signal& u) {
  double tv = 0.0;
  for (int i = 0; i + 1 < u.size(); ++i) tv += std::abs(u.values[i + 1] - u.values[i]);
  return tv;
}

inline double weighted_tv(const Signal& u, const WeightField& alpha) {
  require_same_grid(u.grid, alpha.grid, "weighted_tv");
  double tv = 0.0;
  for (int i = 0; i < u.grid.num_edges(); ++i)
    tv += alpha.edge_values[i] * std::abs(u.values[i + 1] - u.values[i]);
  return tv;
}

// Scale-free default: smooth ramps stay below it at moderate n, real jumps
// clear it by orders of magnitude.
inline double default_jump_threshold(const Signal& u) {
  const double eps = std::numeric_limits<double>::epsilon();
  return 10.0 * std::sqrt(eps) * value_range(u);
}

struct JumpRecord {
  int edge = 0;
  double x = 0.0;
  double delta = 0.0;      // signed jump u_{i+1} - u_i
  double magnitude = 0.0;  // |delta|
};

struct JumpReport {
  double threshold = 0.0;
  std::vector<JumpRecord> jumps;  // sorted by location

  bool contains_edge(int edge) const {
    for (const auto& r : jumps)
      if (r.edge == edge) return true;
    return false;
  }
};

inline JumpReport jump_set(const Signal& u, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("jump_set: need threshold >= 0");
  JumpReport rep;
  rep.threshold = threshold;
  for (int i = 0; i < u.grid.num_edges(); ++i) {
    const double d = u.values[i + 1] - u.values[i];
    if (std::abs(d) > threshold) rep.jumps.push_back({i, u.grid.edge(i), d, std::abs(d)});
  }
  return rep;
}

inline JumpReport jump_set(const Signal& u) { return jump_set(u, default_jump_threshold(u)); }

}  // namespace wtv1d
