#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wtv1d/bv.hpp"
#include "wtv1d/grid.hpp"
#include "wtv1d/weights.hpp"

namespace wtv1d {

enum class StepRule { fista_restart, fista, gradient };

struct SolverOptions {
  int max_iterations = 400000;
  double gap_tolerance = 1e-10;  // relative duality gap
  StepRule step_rule = StepRule::fista_restart;
  bool polish = true;        // exact active-set refinement, accepted only when gap-certified
  int polish_interval = 250;
  bool coarse_warm_start = true;  // initialize the dual from a half-resolution solve
};

// Solution of min_u (h/2) sum (f_j - u_j)^2 + sum alpha_i |u_{i+1} - u_i|.
// v holds the dual variable at the n+1 grid nodes with v_0 = v_n = 0; the
// linkage u = f - (1/h) Bv holds exactly by construction.
struct Solution {
  Signal u;
  std::vector<double> v;
  double gap = 0.0;  // relative duality gap at return
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Shared dual engine for
//   min_u (h/2) sum_j w_j (f_j - u_j)^2 + sum_i box_i |u_{i+1} - u_i|
// via its box-constrained dual
//   max_v <f, Bv> - (1/2h) sum_j (Bv)_j^2 / w_j,  |v_i| <= box_i, v_0 = v_n = 0,
// where (Bv)_j = v_{j+1} - v_j over nodes. Accelerated projected gradient
// with per-node steps 1/M_i, M_i = 2 H_ii (the uniform-weight case gives
// the spectral bound 4/h), restart on a non-monotone dual objective.

struct BoxQpResult {
  std::vector<double> u;
  std::vector<double> v;  // n+1 nodes
  double rel_gap = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

inline double relative_gap(double primal, double dual) {
  return std::max(0.0, primal - dual) / (1.0 + std::abs(primal));
}

inline double primal_energy(const Grid& g, const std::vector<double>& f, const std::vector<double>& w,
                            const std::vector<double>& box, const std::vector<double>& u) {
  double fid = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double r = f[j] - u[j];
    fid += w[j] * r * r;
  }
  double tv = 0.0;
  for (int i = 0; i < g.n - 1; ++i) tv += box[i] * std::abs(u[i + 1] - u[i]);
  return 0.5 * g.h * fid + tv;
}

// v given on interior nodes (size n-1), implicitly padded with zeros.
inline double dual_energy(const Grid& g, const std::vector<double>& f, const std::vector<double>& w,
                          const std::vector<double>& v) {
  double acc = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double vl = (j > 0) ? v[j - 1] : 0.0;
    const double vr = (j < g.n - 1) ? v[j] : 0.0;
    const double bv = vr - vl;
    acc += bv * (f[j] - bv / (2.0 * g.h * w[j]));
  }
  return acc;
}

inline void primal_from_dual(const Grid& g, const std::vector<double>& f, const std::vector<double>& w,
                             const std::vector<double>& v, std::vector<double>& u) {
  u.resize(g.n);
  for (int j = 0; j < g.n; ++j) {
    const double vl = (j > 0) ? v[j - 1] : 0.0;
    const double vr = (j < g.n - 1) ? v[j] : 0.0;
    u[j] = f[j] - (vr - vl) / (g.h * w[j]);
  }
}

inline std::vector<double> pad_nodes(const Grid& g, const std::vector<double>& v) {
  std::vector<double> p(g.n + 1, 0.0);
  std::copy(v.begin(), v.end(), p.begin() + 1);
  return p;
}

struct PinnedCandidate {
  std::vector<double> u;
  std::vector<double> v;  // n+1 nodes
};

// Exact candidate from a pin structure: hold the dual at the pinned edges,
// solve every flat run for its weighted mean, rebuild v by integrating the
// linkage and clamp it to the box. With relink the primal is rebuilt from
// the clamped dual (exact linkage, plateaus carry rounding wiggles);
// without it the plateaus stay exactly flat. The caller accepts candidates
// only through their duality gap.
inline PinnedCandidate build_pinned_candidate(const Grid& g, const std::vector<double>& f,
                                              const std::vector<double>& w, const std::vector<double>& box,
                                              const std::vector<double>& pin_values, bool relink) {
  const int n = g.n;
  const double h = g.h;

  PinnedCandidate out;
  out.u.resize(n);
  int seg_begin = 0;
  double v_left = 0.0;
  auto flush = [&](int seg_end, double v_right) {
    double sw = 0.0, swf = 0.0;
    for (int j = seg_begin; j <= seg_end; ++j) {
      sw += h * w[j];
      swf += h * w[j] * f[j];
    }
    const double m = (swf - (v_right - v_left)) / sw;
    for (int j = seg_begin; j <= seg_end; ++j) out.u[j] = m;
  };
  for (int i = 0; i < n - 1; ++i) {
    if (std::isnan(pin_values[i])) continue;
    flush(i, pin_values[i]);
    seg_begin = i + 1;
    v_left = pin_values[i];
  }
  flush(n - 1, 0.0);

  out.v.assign(n + 1, 0.0);
  for (int j = 0; j < n; ++j) out.v[j + 1] = out.v[j] + h * w[j] * (f[j] - out.u[j]);
  out.v[n] = 0.0;
  for (int i = 0; i < n - 1; ++i) out.v[i + 1] = std::clamp(out.v[i + 1], -box[i], box[i]);
  if (relink)
    for (int j = 0; j < n; ++j) out.u[j] = f[j] - (out.v[j + 1] - out.v[j]) / (h * w[j]);
  return out;
}

// Pin structure read off the jump pattern of a primal iterate.
inline std::vector<double> pins_from_jumps(const std::vector<double>& box,
                                           const std::vector<double>& u_hint, double threshold) {
  const int m = static_cast<int>(box.size());
  std::vector<double> pins(m, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < m; ++i) {
    const double d = u_hint[i + 1] - u_hint[i];
    if (box[i] == 0.0 || std::abs(d) > threshold) pins[i] = -box[i] * static_cast<double>(sgn(d));
  }
  return pins;
}

// Exact pivoting on the dual QP from a feasible start: fix the active box
// constraints, solve the free runs by tridiagonal elimination, step to the
// first blocking constraint, drop constraints with negative multipliers.
// Finite for this strictly convex quadratic; capped by max_pivots. The
// caller certifies the result through the duality gap like any candidate.
struct ActiveSetResult {
  std::vector<double> v;      // interior nodes
  std::vector<int> state;     // 0 free, +-1 pinned at +-box, 2 degenerate box
};

inline ActiveSetResult active_set_exact(const Grid& g, const std::vector<double>& f,
                                        const std::vector<double>& w, const std::vector<double>& box,
                                        std::vector<double> v, int max_pivots) {
  const int m = g.n - 1;
  const double h = g.h;
  std::vector<double> gv(m), diag(m), off(m);  // off[k]: coupling between nodes k and k+1
  for (int k = 0; k < m; ++k) {
    gv[k] = f[k] - f[k + 1];
    diag[k] = (1.0 / w[k] + 1.0 / w[k + 1]) / h;
    off[k] = -1.0 / (h * w[k + 1]);
  }

  std::vector<int> state(m);  // 0 free, +-1 pinned at +-box, 2 degenerate box
  for (int k = 0; k < m; ++k) {
    if (box[k] == 0.0) {
      state[k] = 2;
      v[k] = 0.0;
    } else if (v[k] >= box[k]) {
      state[k] = 1;
      v[k] = box[k];
    } else if (v[k] <= -box[k]) {
      state[k] = -1;
      v[k] = -box[k];
    }
  }

  std::vector<double> vn(m), cp(m), dp(m), r(m);
  for (int pivot = 0; pivot < max_pivots; ++pivot) {
    for (int k = 0; k < m; ++k)
      if (state[k] != 0) vn[k] = state[k] == 2 ? 0.0 : state[k] * box[k];
    int p = 0;
    while (p < m) {
      if (state[p] != 0) {
        ++p;
        continue;
      }
      int q = p;
      while (q + 1 < m && state[q + 1] == 0) ++q;
      // Thomas elimination on nodes p..q with fixed neighbors moved to the rhs
      for (int k = p; k <= q; ++k) {
        double rhs = gv[k];
        if (k == p && p > 0) rhs -= off[p - 1] * vn[p - 1];
        if (k == q && q + 1 < m) rhs -= off[q] * vn[q + 1];
        const double denom = (k > p) ? diag[k] - off[k - 1] * cp[k - 1] : diag[k];
        cp[k] = (k < q) ? off[k] / denom : 0.0;
        dp[k] = (rhs - (k > p ? off[k - 1] * dp[k - 1] : 0.0)) / denom;
      }
      vn[q] = dp[q];
      for (int k = q - 1; k >= p; --k) vn[k] = dp[k] - cp[k] * vn[k + 1];
      p = q + 1;
    }

    // step toward vn until the first free component hits the box
    double t = 1.0;
    int blocker = -1, bsign = 0;
    for (int k = 0; k < m; ++k) {
      if (state[k] != 0) continue;
      const double d = vn[k] - v[k];
      if (d > 0.0 && vn[k] > box[k]) {
        const double tk = (box[k] - v[k]) / d;
        if (tk < t) {
          t = tk;
          blocker = k;
          bsign = 1;
        }
      } else if (d < 0.0 && vn[k] < -box[k]) {
        const double tk = (-box[k] - v[k]) / d;
        if (tk < t) {
          t = tk;
          blocker = k;
          bsign = -1;
        }
      }
    }
    if (blocker >= 0) {
      for (int k = 0; k < m; ++k)
        if (state[k] == 0) v[k] += t * (vn[k] - v[k]);
      v[blocker] = bsign * box[blocker];
      state[blocker] = bsign;
      continue;
    }
    for (int k = 0; k < m; ++k)
      if (state[k] == 0) v[k] = vn[k];

    // multipliers of the pinned constraints
    for (int k = 0; k < m; ++k) {
      double hv = diag[k] * v[k];
      if (k > 0) hv += off[k - 1] * v[k - 1];
      if (k + 1 < m) hv += off[k] * v[k + 1];
      r[k] = hv - gv[k];
    }
    int drop = -1;
    double worst = -1e-14 * (1.0 + max_abs(gv));
    for (int k = 0; k < m; ++k) {
      if (state[k] != 1 && state[k] != -1) continue;
      const double lambda = -state[k] * r[k];
      if (lambda < worst) {
        worst = lambda;
        drop = k;
      }
    }
    if (drop >= 0) {
      state[drop] = 0;
      continue;
    }

    // iterative refinement on the free runs: one tridiagonal pass leaves
    // residuals that add up across long runs, so re-solve against them
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (int k = 0; k < m; ++k) {
        double hv = diag[k] * v[k];
        if (k > 0) hv += off[k - 1] * v[k - 1];
        if (k + 1 < m) hv += off[k] * v[k + 1];
        r[k] = gv[k] - hv;
      }
      int s = 0;
      while (s < m) {
        if (state[s] != 0) {
          ++s;
          continue;
        }
        int q = s;
        while (q + 1 < m && state[q + 1] == 0) ++q;
        for (int k = s; k <= q; ++k) {
          const double denom = (k > s) ? diag[k] - off[k - 1] * cp[k - 1] : diag[k];
          cp[k] = (k < q) ? off[k] / denom : 0.0;
          dp[k] = (r[k] - (k > s ? off[k - 1] * dp[k - 1] : 0.0)) / denom;
        }
        double delta = dp[q];
        v[q] = std::clamp(v[q] + delta, -box[q], box[q]);
        for (int k = q - 1; k >= s; --k) {
          delta = dp[k] - cp[k] * delta;
          v[k] = std::clamp(v[k] + delta, -box[k], box[k]);
        }
        s = q + 1;
      }
    }
    break;
  }
  return ActiveSetResult{std::move(v), std::move(state)};
}

inline BoxQpResult solve_box_qp(const Grid& g, const std::vector<double>& f, const std::vector<double>& w,
                                const std::vector<double>& box, const SolverOptions& opts,
                                const std::vector<double>* v_init = nullptr) {
  if (opts.max_iterations < 1) throw std::invalid_argument("solver: need max_iterations >= 1");
  if (!(opts.gap_tolerance > 0.0)) throw std::invalid_argument("solver: need gap_tolerance > 0");
  const int n = g.n;
  const int m = n - 1;
  const double h = g.h;

  // Coarse-to-fine warm start: solve the half-resolution problem and
  // prolong its dual. Pure initialization; the fine-level gap still
  // certifies the result.
  std::vector<double> warm;
  if (!v_init && opts.coarse_warm_start && n >= 128 && n % 2 == 0) {
    const int nc = n / 2;
    const Grid gc = make_grid(g.a, g.b, nc);
    std::vector<double> fc(nc), wc(nc), boxc(nc - 1);
    for (int j = 0; j < nc; ++j) {
      const double wa = w[2 * j], wb = w[2 * j + 1];
      wc[j] = 0.5 * (wa + wb);
      fc[j] = (wa * f[2 * j] + wb * f[2 * j + 1]) / (wa + wb);
    }
    for (int i = 0; i + 1 < nc; ++i) boxc[i] = box[2 * i + 1];
    SolverOptions copts = opts;
    copts.max_iterations = std::max(1, opts.max_iterations / 2);
    const BoxQpResult coarse = solve_box_qp(gc, fc, wc, boxc, copts);
    warm.assign(m, 0.0);
    for (int k = 1; k < nc; ++k) warm[2 * k - 1] = coarse.v[k];
    for (int k = 0; k < nc; ++k) warm[2 * k] = 0.5 * (coarse.v[k] + coarse.v[k + 1]);
    v_init = &warm;
  }

  std::vector<double> step(m);
  for (int k = 0; k < m; ++k) step[k] = h / (2.0 * (1.0 / w[k] + 1.0 / w[k + 1]));

  std::vector<double> x(m, 0.0), y(m, 0.0), xn(m), grad(m), u(n);
  if (v_init) {
    for (int k = 0; k < m; ++k) x[k] = std::clamp((*v_init)[k], -box[k], box[k]);
    y = x;
  }
  double t = 1.0;
  double dual_prev = -std::numeric_limits<double>::infinity();

  BoxQpResult best;
  auto consider = [&](const std::vector<double>& uu, const std::vector<double>& vpad, double rg, int it) {
    if (rg < best.rel_gap) {
      best.u = uu;
      best.v = vpad;
      best.rel_gap = rg;
      best.iterations = it;
    }
  };

  auto evaluate_candidate = [&](const std::vector<double>& uu, const std::vector<double>& vpad,
                                int it) -> double {
    std::vector<double> vint(vpad.begin() + 1, vpad.end() - 1);
    const double pc = primal_energy(g, f, w, box, uu);
    const double dc = dual_energy(g, f, w, vint);
    const double rg = relative_gap(pc, dc);
    consider(uu, vpad, rg, it);
    return rg;
  };

  auto try_pins = [&](const std::vector<double>& pins, int it) -> bool {
    bool hit = false;
    for (bool relink : {true, false}) {
      const PinnedCandidate cand = build_pinned_candidate(g, f, w, box, pins, relink);
      hit = evaluate_candidate(cand.u, cand.v, it) <= opts.gap_tolerance || hit;
    }
    return hit;
  };

  auto try_polish = [&](const std::vector<double>& u_hint, const std::vector<double>& v_hint,
                        int it) -> bool {
    const double eps10 = 10.0 * std::sqrt(std::numeric_limits<double>::epsilon());
    bool hit = false;
    const auto [lo, hi] = std::minmax_element(u_hint.begin(), u_hint.end());
    double thr = eps10 * (*hi - *lo);
    for (int round = 0; round < 5; ++round, thr *= 100.0) {
      hit = try_pins(pins_from_jumps(box, u_hint, thr), it) || hit;
      if (thr == 0.0) break;
    }
    if (!hit) {
      // exact pivoting resolves marginally active boxes the jump-pattern
      // heuristics cannot see; rebuild candidates from its pin structure
      const ActiveSetResult ex = active_set_exact(g, f, w, box, v_hint, 400);
      std::vector<double> uex(n);
      primal_from_dual(g, f, w, ex.v, uex);
      hit = evaluate_candidate(uex, pad_nodes(g, ex.v), it) <= opts.gap_tolerance;
      std::vector<double> pins(m, std::numeric_limits<double>::quiet_NaN());
      for (int k = 0; k < m; ++k) {
        if (ex.state[k] == 2) pins[k] = 0.0;
        else if (ex.state[k] != 0) pins[k] = ex.state[k] * box[k];
      }
      hit = try_pins(pins, it) || hit;
    }
    return hit;
  };

  for (int it = 1; it <= opts.max_iterations; ++it) {
    for (int k = 0; k < m; ++k) {
      const double yl = (k > 0) ? y[k - 1] : 0.0;
      const double yr = (k + 1 < m) ? y[k + 1] : 0.0;
      grad[k] = ((y[k] - yl) / w[k] + (y[k] - yr) / w[k + 1]) / h - (f[k] - f[k + 1]);
    }
    for (int k = 0; k < m; ++k) xn[k] = std::clamp(y[k] - step[k] * grad[k], -box[k], box[k]);

    const double dual = dual_energy(g, f, w, xn);
    primal_from_dual(g, f, w, xn, u);
    const double primal = primal_energy(g, f, w, box, u);
    const double rg = relative_gap(primal, dual);
    consider(u, pad_nodes(g, xn), rg, it);

    if (rg <= opts.gap_tolerance) {
      if (opts.polish) try_polish(u, xn, it);  // sharpen the certificate when the structure is clean
      best.converged = true;
      return best;
    }

    if (opts.polish && (it == 50 || it % opts.polish_interval == 0)) {
      if (try_polish(u, xn, it)) {
        best.converged = true;
        return best;
      }
    }

    switch (opts.step_rule) {
      case StepRule::gradient:
        y = xn;
        break;
      case StepRule::fista:
      case StepRule::fista_restart: {
        const bool restart = opts.step_rule == StepRule::fista_restart && dual < dual_prev;
        if (restart) {
          t = 1.0;
          y = xn;
        } else {
          const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
          const double beta = (t - 1.0) / tn;
          for (int k = 0; k < m; ++k) y[k] = xn[k] + beta * (xn[k] - x[k]);
          t = tn;
        }
        break;
      }
    }
    std::swap(x, xn);
    dual_prev = dual;
  }

  if (opts.polish) {
    std::vector<double> vbest(best.v.begin() + 1, best.v.end() - 1);
    if (try_polish(best.u, vbest, opts.max_iterations)) best.converged = true;
  }
  best.iterations = opts.max_iterations;
  return best;
}

inline void validate_solve_inputs(const Signal& f, const WeightField& weight, const char* where) {
  require_same_grid(f.grid, weight.grid, where);
  require_finite(f.values, where);
  if (f.size() != f.grid.n) throw std::invalid_argument(std::string(where) + ": signal length mismatch");
}

}  // namespace detail

inline double objective_wtv(const Signal& f, const WeightField& alpha, const Signal& u) {
  require_same_grid(f.grid, alpha.grid, "objective_wtv");
  require_same_grid(f.grid, u.grid, "objective_wtv");
  double fid = 0.0;
  for (int j = 0; j < f.grid.n; ++j) {
    const double r = f.values[j] - u.values[j];
    fid += r * r;
  }
  return 0.5 * f.grid.h * fid + weighted_tv(u, alpha);
}

// Lower bound on the primal optimum for any feasible v (length n+1,
// v_0 = v_n = 0, |v_i| <= alpha_i at interior nodes).
inline double dual_objective(const Signal& f, const WeightField& alpha, const std::vector<double>& v) {
  require_same_grid(f.grid, alpha.grid, "dual_objective");
  const int n = f.grid.n;
  if (static_cast<int>(v.size()) != n + 1) throw std::invalid_argument("dual_objective: v must have n+1 nodes");
  if (v.front() != 0.0 || v.back() != 0.0) throw std::invalid_argument("dual_objective: need v_0 = v_n = 0");
  const double slack = 1e-12 * (1.0 + alpha.max_edge());
  for (int i = 0; i < n - 1; ++i)
    if (std::abs(v[i + 1]) > alpha.edge_values[i] + slack)
      throw std::invalid_argument("dual_objective: box constraint violated");
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double bv = v[j + 1] - v[j];
    acc += bv * (f.values[j] - bv / (2.0 * f.grid.h));
  }
  return acc;
}

inline Solution solve_wtv(const Signal& f, const WeightField& alpha, const SolverOptions& opts = {}) {
  detail::validate_solve_inputs(f, alpha, "solve_wtv");
  for (double a : alpha.edge_values)
    if (!(a >= 0.0)) throw std::invalid_argument("solve_wtv: weights must be >= 0");
  const std::vector<double> w(f.grid.n, 1.0);
  auto res = detail::solve_box_qp(f.grid, f.values, w, alpha.edge_values, opts);
  return Solution{Signal{f.grid, std::move(res.u)}, std::move(res.v), res.rel_gap, res.iterations,
                  res.converged};
}

struct SemigroupResult {
  Solution one_shot;      // weight alpha1 + alpha2 in a single solve
  Solution intermediate;  // weight alpha1
  Solution two_step;      // scalar alpha2 applied to the intermediate solution
  double distance = 0.0;  // max-norm between one_shot.u and two_step.u
  bool all_converged() const { return one_shot.converged && intermediate.converged && two_step.converged; }
};

inline SemigroupResult semigroup_compose(const Signal& f, const WeightField& alpha1, double alpha2,
                                         const SolverOptions& opts = {}) {
  if (!(alpha2 >= 0.0)) throw std::invalid_argument("semigroup_compose: need alpha2 >= 0");
  SemigroupResult r;
  r.one_shot = solve_wtv(f, alpha1.with_added(alpha2), opts);
  r.intermediate = solve_wtv(f, alpha1, opts);
  r.two_step = solve_wtv(r.intermediate.u, realize_weight(scalar_weight(alpha2), f.grid), opts);
  r.distance = linf_distance(r.one_shot.u, r.two_step.u);
  return r;
}

struct VanishingWeightEntry {
  double floor = 0.0;
  Solution solution;
  double distance_to_final = 0.0;
};

struct VanishingWeightResult {
  std::vector<VanishingWeightEntry> entries;
  std::vector<double> objectives;            // J_k(u_k) with each floor's own weight
  std::vector<double> successive_distances;  // ||u_k - u_{k+1}||_inf
};

inline VanishingWeightResult vanishing_weight_limit(const Signal& f, const WeightField& alpha,
                                                    const std::vector<double>& floors,
                                                    const SolverOptions& opts = {}) {
  if (floors.empty()) throw std::invalid_argument("vanishing_weight_limit: need at least one floor");
  for (std::size_t k = 0; k < floors.size(); ++k) {
    if (!(floors[k] > 0.0)) throw std::invalid_argument("vanishing_weight_limit: floors must be > 0");
    if (k > 0 && !(floors[k] < floors[k - 1]))
      throw std::invalid_argument("vanishing_weight_limit: floors must be strictly decreasing");
  }
  VanishingWeightResult out;
  for (double fl : floors) {
    VanishingWeightEntry e;
    e.floor = fl;
    const WeightField af = alpha.with_added(fl);
    e.solution = solve_wtv(f, af, opts);
    out.objectives.push_back(objective_wtv(f, af, e.solution.u));
    out.entries.push_back(std::move(e));
  }
  const Signal& last = out.entries.back().solution.u;
  for (auto& e : out.entries) e.distance_to_final = linf_distance(e.solution.u, last);
  for (std::size_t k = 0; k + 1 < out.entries.size(); ++k)
    out.successive_distances.push_back(
        linf_distance(out.entries[k].solution.u, out.entries[k + 1].solution.u));
  return out;
}

}  // namespace wtv1d
