#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wtv1d/bv.hpp"
#include "wtv1d/grid.hpp"
#include "wtv1d/solve.hpp"
#include "wtv1d/weights.hpp"

namespace wtv1d {

// Weighted-fidelity problem: min_u (h/2) sum w_j (f_j - u_j)^2 + sum |u_{i+1} - u_i|.
// Cells with w below the floor are raised to it inside the solver; the
// floored problem is strictly convex and selects one minimizer of the
// degenerate limit.
struct FidSolution {
  Signal u;
  std::vector<double> v;  // n+1 nodes, v_0 = v_n = 0, |v_i| <= 1
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  double floor_used = 0.0;
};

inline double default_fid_floor(const WeightField& w) { return 1e-8 * w.max_cell(); }

inline std::vector<double> floored_cells(const WeightField& w, double floor) {
  std::vector<double> out = w.cell_values;
  for (double& v : out) v = std::max(v, floor);
  return out;
}

inline double objective_wfid(const Signal& f, const std::vector<double>& w_cells, const Signal& u) {
  require_same_grid(f.grid, u.grid, "objective_wfid");
  if (static_cast<int>(w_cells.size()) != f.grid.n)
    throw std::invalid_argument("objective_wfid: weight cell count mismatch");
  double fid = 0.0;
  for (int j = 0; j < f.grid.n; ++j) {
    const double r = f.values[j] - u.values[j];
    fid += w_cells[j] * r * r;
  }
  return 0.5 * f.grid.h * fid + total_variation(u);
}

inline FidSolution solve_wfid(const Signal& f, const WeightField& w, const SolverOptions& opts = {},
                              double floor = -1.0) {
  detail::validate_solve_inputs(f, w, "solve_wfid");
  for (double x : w.cell_values)
    if (!(x >= 0.0)) throw std::invalid_argument("solve_wfid: weights must be >= 0");
  if (w.max_cell() <= 0.0) throw std::invalid_argument("solve_wfid: weight is identically zero");
  if (floor < 0.0) floor = default_fid_floor(w);
  const std::vector<double> wf = floored_cells(w, floor);
  const std::vector<double> box(f.grid.num_edges(), 1.0);
  auto res = detail::solve_box_qp(f.grid, f.values, wf, box, opts);
  return FidSolution{Signal{f.grid, std::move(res.u)}, std::move(res.v), res.rel_gap,
                     res.iterations, res.converged, floor};
}

// Clamp structure of a solution against strictly monotone data: u equals
// f clamped between its first and last values, constant outside [x1, x2].
struct ClampForm {
  bool is_clamp = false;
  double x1 = 0.0;  // first cell center where u meets f (within tol)
  double x2 = 0.0;  // last such cell center
};

inline ClampForm clamp_form_check(const Signal& u, const Signal& f, double tol) {
  require_same_grid(u.grid, f.grid, "clamp_form_check");
  if (!(tol >= 0.0)) throw std::invalid_argument("clamp_form_check: need tol >= 0");
  const int n = f.grid.n;
  int dir = 0;
  for (int i = 0; i + 1 < n; ++i) {
    const int s = sgn(f.values[i + 1] - f.values[i]);
    if (s == 0) throw std::invalid_argument("clamp_form_check: data must be strictly monotone");
    if (dir == 0) dir = s;
    else if (s != dir) throw std::invalid_argument("clamp_form_check: data must be strictly monotone");
  }

  const double lo = std::min(u.values.front(), u.values.back());
  const double hi = std::max(u.values.front(), u.values.back());
  ClampForm out;
  out.is_clamp = true;
  for (int j = 0; j < n; ++j) {
    const double model = std::clamp(f.values[j], lo, hi);
    if (std::abs(u.values[j] - model) > tol) {
      out.is_clamp = false;
      break;
    }
  }

  int first = -1, last = -1;
  for (int j = 0; j < n; ++j) {
    if (std::abs(u.values[j] - f.values[j]) <= tol) {
      if (first < 0) first = j;
      last = j;
    }
  }
  if (first < 0) {
    // u never meets f: report the closest approach as the degenerate contact
    int arg = 0;
    double bestv = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      const double d = std::abs(u.values[j] - f.values[j]);
      if (d < bestv) {
        bestv = d;
        arg = j;
      }
    }
    first = last = arg;
  }
  out.x1 = f.grid.cell_center(first);
  out.x2 = f.grid.cell_center(last);
  return out;
}

// Edges where u jumps under a weight that is active on both sides while the
// data does not jump. Empty for solver outputs with w > 0.
struct FidJumpReport {
  std::vector<int> violations;
  bool pass() const { return violations.empty(); }
};

inline FidJumpReport fid_jump_containment(const Signal& u, const Signal& f, const WeightField& w,
                                          double tol, double floor = -1.0) {
  require_same_grid(u.grid, f.grid, "fid_jump_containment");
  require_same_grid(u.grid, w.grid, "fid_jump_containment");
  if (floor < 0.0) floor = default_fid_floor(w);
  FidJumpReport rep;
  for (int i = 0; i < u.grid.num_edges(); ++i) {
    const bool u_jumps = std::abs(u.values[i + 1] - u.values[i]) > tol;
    const bool f_jumps = std::abs(f.values[i + 1] - f.values[i]) > tol;
    const bool w_active = w.cell_values[i] > floor && w.cell_values[i + 1] > floor;
    if (u_jumps && w_active && !f_jumps) rep.violations.push_back(i);
  }
  return rep;
}

// --- Constancy threshold for affine data ------------------------------------
//
// For f = lambda x and cell-wise constant w, the two boundary potentials
//   phi1(x) = lambda int_a^x w(s)(s - x) ds   (decreasing from 0)
//   phi2(x) = -lambda int_x^b w(s)(s - x) ds  (increasing to 0)
// cross at a value k; the solution is constant exactly when k > -1, and is
// the clamp form with x1 = min{phi1 = -1}, x2 = max{phi2 = -1} otherwise.

inline double fid_phi1(const Grid& g, const std::vector<double>& w_cells, double lambda, double x) {
  double acc = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double xl = g.node(j);
    const double xr = std::min(g.node(j + 1), x);
    if (xr <= xl) break;
    // int_{xl}^{xr} (s - x) ds
    acc += w_cells[j] * 0.5 * ((xr - x) * (xr - x) - (xl - x) * (xl - x));
  }
  return lambda * acc;
}

inline double fid_phi2(const Grid& g, const std::vector<double>& w_cells, double lambda, double x) {
  double acc = 0.0;
  for (int j = g.n - 1; j >= 0; --j) {
    const double xr = g.node(j + 1);
    const double xl = std::max(g.node(j), x);
    if (xr <= xl) break;
    acc += w_cells[j] * 0.5 * ((xr - x) * (xr - x) - (xl - x) * (xl - x));
  }
  return -lambda * acc;
}

struct FidConstancy {
  double crossing_value = 0.0;  // common value of phi1 and phi2 at their crossing
  double crossing_point = 0.0;
  bool constant_predicted = false;
};

inline FidConstancy fid_constancy(const Grid& g, const std::vector<double>& w_cells, double lambda) {
  if (static_cast<int>(w_cells.size()) != g.n)
    throw std::invalid_argument("fid_constancy: weight cell count mismatch");
  double lo = g.a, hi = g.b;
  auto diff = [&](double x) { return fid_phi1(g, w_cells, lambda, x) - fid_phi2(g, w_cells, lambda, x); };
  // phi1 - phi2 is continuous and decreasing, >= 0 at a and <= 0 at b.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (diff(mid) >= 0.0) lo = mid;
    else hi = mid;
  }
  FidConstancy out;
  out.crossing_point = 0.5 * (lo + hi);
  out.crossing_value = 0.5 * (fid_phi1(g, w_cells, lambda, out.crossing_point) +
                              fid_phi2(g, w_cells, lambda, out.crossing_point));
  out.constant_predicted = out.crossing_value > -1.0;
  return out;
}

// --- Piecewise-constant recovery in the limit -------------------------------
//
// Weights n^2 on balls of radius 1/n around each data jump force the
// solution toward the data there; elsewhere it interpolates monotonically.
// A family whose L1 mass vanishes instead drives the solution to a constant.

struct PcRecoveryPoint {
  int level = 0;
  double sup_error = 0.0;  // ||f0 - u||_inf
  FidSolution solution;
};

enum class PcWeightFamily { concentrating, vanishing_mass };

inline std::vector<PcRecoveryPoint> pc_limit_recovery(
    const std::function<double(double)>& f0, const std::function<double(double)>& eta,
    const std::vector<double>& jumps, const std::vector<int>& levels, const Grid& grid,
    const SolverOptions& opts = {}, PcWeightFamily family = PcWeightFamily::concentrating) {
  if (levels.empty()) throw std::invalid_argument("pc_limit_recovery: need at least one level");
  int max_level = 0;
  for (int m : levels) {
    if (m < 1) throw std::invalid_argument("pc_limit_recovery: levels must be >= 1");
    max_level = std::max(max_level, m);
  }
  if (1.0 / max_level < 3.0 * grid.h)
    throw std::invalid_argument("pc_limit_recovery: level too large for grid (1/n must span >= 3 cells)");
  for (double xj : jumps) {
    if (!(xj > grid.a && xj < grid.b))
      throw std::invalid_argument("pc_limit_recovery: jump outside the domain");
    if (std::abs(eta(xj)) > 1e-9)
      throw std::invalid_argument("pc_limit_recovery: noise must vanish at the data jumps");
  }

  const Signal f0s = sample(grid, f0);
  const Signal f = sample(grid, [&](double x) { return f0(x) + eta(x); });

  std::vector<PcRecoveryPoint> out;
  for (int m : levels) {
    const double radius = 1.0 / static_cast<double>(m);
    const double height = family == PcWeightFamily::concentrating
                              ? static_cast<double>(m) * m
                              : std::sqrt(static_cast<double>(m));
    std::vector<double> w(grid.n, 0.0);
    for (int j = 0; j < grid.n; ++j) {
      const double x = grid.cell_center(j);
      for (double xj : jumps)
        if (std::abs(x - xj) < radius) w[j] = height;
    }
    PcRecoveryPoint pt;
    pt.level = m;
    pt.solution = solve_wfid(f, cell_weight_field(grid, w), opts);
    pt.sup_error = linf_distance(pt.solution.u, f0s);
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace wtv1d
