#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "wtv1d/grid.hpp"
#include "wtv1d/weights.hpp"

namespace wtv1d {

// Randomized instances for property campaigns. All draws go through the raw
// 64-bit stream so runs are reproducible across standard libraries.

inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * u01(rng); }

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Piecewise signal with up to max_pieces pieces, each constant or affine.
inline Signal random_piecewise_signal(std::mt19937_64& rng, const Grid& g, int max_pieces,
                                      bool allow_affine = true, double amplitude = 1.0) {
  const int pieces = uniform_int(rng, 1, max_pieces);
  std::vector<double> breaks;
  for (int k = 0; k + 1 < pieces; ++k) breaks.push_back(uniform(rng, g.a, g.b));
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(g.b + 1.0);

  struct Piece {
    double level, slope, x0;
  };
  std::vector<Piece> ps;
  for (int k = 0; k < pieces; ++k) {
    Piece p;
    p.level = uniform(rng, -amplitude, amplitude);
    p.slope = (allow_affine && u01(rng) < 0.5) ? uniform(rng, -2.0 * amplitude, 2.0 * amplitude) : 0.0;
    p.x0 = (k == 0) ? g.a : breaks[k - 1];
    ps.push_back(p);
  }
  return sample(g, [&](double x) {
    int k = 0;
    while (x >= breaks[k]) ++k;
    return ps[k].level + ps[k].slope * (x - ps[k].x0);
  });
}

// Weight spec drawn from the scalar / V-shaped / piecewise-affine families
// with values up to 2 * scale. With allow_vanishing the minimum may touch 0.
// Kinks are placed exactly on interior edges so the sampled weight carries
// its full derivative jump where the symbolic bookkeeping records it.
inline WeightSpec random_weight_spec(std::mt19937_64& rng, const Grid& g, double scale,
                                     bool allow_vanishing) {
  const double top = 2.0 * scale;
  const double floor = allow_vanishing ? 0.0 : 0.05 * scale;
  auto snap = [&](double x) { return g.edge(g.nearest_edge(x)); };
  const int family = uniform_int(rng, 0, 2);
  if (family == 0) {
    return scalar_weight(std::max(floor, uniform(rng, 0.0, top)));
  }
  if (family == 1) {
    const double span = g.length();
    const double mu = uniform(rng, 0.0, top / span);
    const double c = allow_vanishing && u01(rng) < 0.3 ? 0.0 : uniform(rng, floor, 0.5 * top);
    const double x0 = snap(uniform(rng, g.a + 0.1 * span, g.b - 0.1 * span));
    return abs_weight(mu, std::max(c, floor), x0);
  }
  const int knots = uniform_int(rng, 3, 6);
  std::vector<double> xs, ys;
  xs.push_back(g.a);
  for (int k = 0; k < knots - 2; ++k) xs.push_back(snap(uniform(rng, g.a, g.b)));
  xs.push_back(g.b);
  std::sort(xs.begin(), xs.end());
  for (std::size_t k = 1; k + 1 < xs.size(); ++k)
    while (k + 1 < xs.size() && xs[k] - xs[k - 1] < 0.5 * g.h) xs.erase(xs.begin() + k);
  if (xs.back() - xs[xs.size() - 2] < 0.5 * g.h) xs.erase(xs.end() - 2);
  for (std::size_t k = 0; k < xs.size(); ++k) ys.push_back(std::max(floor, uniform(rng, 0.0, top)));
  if (allow_vanishing && u01(rng) < 0.3) ys[uniform_int(rng, 0, static_cast<int>(ys.size()) - 1)] = 0.0;
  return pwa_weight(std::move(xs), std::move(ys));
}

// Cell fidelity weights: piecewise-constant, positive, occasional near-zero dips.
inline std::vector<double> random_fid_cells(std::mt19937_64& rng, const Grid& g, double top) {
  const int pieces = uniform_int(rng, 1, 6);
  std::vector<double> breaks;
  for (int k = 0; k + 1 < pieces; ++k) breaks.push_back(uniform(rng, g.a, g.b));
  std::sort(breaks.begin(), breaks.end());
  breaks.push_back(g.b + 1.0);
  std::vector<double> levels;
  for (int k = 0; k < pieces; ++k) levels.push_back(uniform(rng, 0.05 * top, top));
  std::vector<double> w(g.n);
  for (int j = 0; j < g.n; ++j) {
    const double x = g.cell_center(j);
    int k = 0;
    while (x >= breaks[k]) ++k;
    w[j] = levels[k];
  }
  return w;
}

}  // namespace wtv1d
