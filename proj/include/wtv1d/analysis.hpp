#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wtv1d/bv.hpp"
#include "wtv1d/fidelity.hpp"
#include "wtv1d/grid.hpp"
#include "wtv1d/solve.hpp"
#include "wtv1d/weights.hpp"

namespace wtv1d {

enum class KktMode { wtv, wfid };

// Reconstruct the dual variable by integrating the linkage condition from
// the left: v_0 = 0, v_i = v_{i-1} + h (f_j - u_j) (times w_j in wfid mode).
// At an optimum v_n vanishes and v obeys the box and sign conditions.
inline std::vector<double> build_certificate(const Signal& f, const Signal& u, const WeightField& weight,
                                             KktMode mode) {
  require_same_grid(f.grid, u.grid, "build_certificate");
  require_same_grid(f.grid, weight.grid, "build_certificate");
  const int n = f.grid.n;
  const double h = f.grid.h;
  std::vector<double> wf;
  if (mode == KktMode::wfid) wf = floored_cells(weight, default_fid_floor(weight));
  std::vector<double> v(n + 1, 0.0);
  for (int j = 0; j < n; ++j) {
    const double scale = mode == KktMode::wfid ? wf[j] : 1.0;
    v[j + 1] = v[j] + h * scale * (f.values[j] - u.values[j]);
  }
  return v;
}

struct CertificateTolerances {
  double boundary = -1.0;  // |v_n|
  double linkage = -1.0;   // max |v_i - v_{i-1} - h w (f - u)|
  double box = -1.0;       // max (|v_i| - alpha_i)^+
  double sign = -1.0;      // max |v_i + alpha_i sign(d_i)| over jump edges
  double jump_threshold = -1.0;
};

struct CertificateReport {
  double boundary_residual = 0.0;
  double linkage_residual = 0.0;
  double box_violation = 0.0;
  double sign_violation = 0.0;
  int worst_linkage_cell = -1;
  int worst_box_node = -1;
  int worst_sign_edge = -1;
  bool boundary_ok = true, linkage_ok = true, box_ok = true, sign_ok = true;
  CertificateTolerances tolerances;

  bool pass() const { return boundary_ok && linkage_ok && box_ok && sign_ok; }
};

inline CertificateReport verify_kkt(const Signal& f, const Signal& u, const WeightField& weight,
                                    KktMode mode, const std::vector<double>& v,
                                    CertificateTolerances tol = {}) {
  require_same_grid(f.grid, u.grid, "verify_kkt");
  require_same_grid(f.grid, weight.grid, "verify_kkt");
  const int n = f.grid.n;
  const double h = f.grid.h;
  if (static_cast<int>(v.size()) != n + 1) throw std::invalid_argument("verify_kkt: v must have n+1 nodes");

  std::vector<double> bound(n - 1);
  if (mode == KktMode::wtv) bound = weight.edge_values;
  else std::fill(bound.begin(), bound.end(), 1.0);
  const double bound_max = *std::max_element(bound.begin(), bound.end());

  std::vector<double> wf;
  if (mode == KktMode::wfid) wf = floored_cells(weight, default_fid_floor(weight));

  if (tol.boundary < 0.0) tol.boundary = 1e-6 * (1.0 + bound_max);
  if (tol.box < 0.0) tol.box = 1e-6 * (1.0 + bound_max);
  if (tol.sign < 0.0) tol.sign = 1e-6 * (1.0 + bound_max);
  if (tol.linkage < 0.0) tol.linkage = 1e-9 * (1.0 + max_abs(f.values));
  if (tol.jump_threshold < 0.0) tol.jump_threshold = default_jump_threshold(u);

  CertificateReport rep;
  rep.tolerances = tol;

  rep.boundary_residual = std::abs(v[n]);
  for (int j = 0; j < n; ++j) {
    const double scale = mode == KktMode::wfid ? wf[j] : 1.0;
    const double r = std::abs(v[j + 1] - v[j] - h * scale * (f.values[j] - u.values[j]));
    if (r > rep.linkage_residual) {
      rep.linkage_residual = r;
      rep.worst_linkage_cell = j;
    }
  }
  for (int i = 0; i < n - 1; ++i) {
    const double excess = std::abs(v[i + 1]) - bound[i];
    if (excess > rep.box_violation) {
      rep.box_violation = excess;
      rep.worst_box_node = i + 1;
    }
    const double d = u.values[i + 1] - u.values[i];
    if (std::abs(d) > tol.jump_threshold) {
      const double r = std::abs(v[i + 1] + bound[i] * static_cast<double>(sgn(d)));
      if (r > rep.sign_violation) {
        rep.sign_violation = r;
        rep.worst_sign_edge = i;
      }
    }
  }
  rep.box_violation = std::max(rep.box_violation, 0.0);
  rep.boundary_ok = rep.boundary_residual <= tol.boundary;
  rep.linkage_ok = rep.linkage_residual <= tol.linkage;
  rep.box_ok = rep.box_violation <= tol.box;
  rep.sign_ok = rep.sign_violation <= tol.sign;
  return rep;
}

inline CertificateReport verify_kkt(const Signal& f, const Signal& u, const WeightField& weight,
                                    KktMode mode, CertificateTolerances tol = {}) {
  return verify_kkt(f, u, weight, mode, build_certificate(f, u, weight, mode), tol);
}

// --- Structural reports ------------------------------------------------------

struct TvBoundResult {
  bool holds = false;
  double margin = 0.0;  // TV(f) - TV(u)
};

inline TvBoundResult tv_bound_check(const Signal& f, const Signal& u, double slack) {
  require_same_grid(f.grid, u.grid, "tv_bound_check");
  TvBoundResult r;
  r.margin = total_variation(f) - total_variation(u);
  r.holds = r.margin >= -slack;
  return r;
}

struct MaxPrincipleResult {
  bool holds = false;
  double overshoot = 0.0;
};

inline MaxPrincipleResult maximum_principle_check(const Signal& f, const Signal& u, double tol) {
  require_same_grid(f.grid, u.grid, "maximum_principle_check");
  const double lo = min_value(f), hi = max_value(f);
  MaxPrincipleResult r;
  for (double x : u.values) r.overshoot = std::max({r.overshoot, lo - x, x - hi});
  r.holds = r.overshoot <= tol;
  return r;
}

struct JumpEstimateRow {
  int edge = 0;
  double x = 0.0;
  double d_u = 0.0;
  double d_f = 0.0;
  double dalpha = 0.0;  // signed derivative jump of the weight
  bool bound_ok = true;
  bool direction_checked = false;
  bool direction_ok = true;
};

struct JumpEstimatesReport {
  std::vector<JumpEstimateRow> rows;  // one per interior edge
  bool all_bounds_ok = true;
  bool all_directions_ok = true;
};

// Per-edge jump bookkeeping: |d(u)| <= |d(f)| + |D alpha'| + tol everywhere;
// where the weight is kink-free and both signals jump, directions agree.
inline JumpEstimatesReport jump_estimates_report(const Signal& f, const Signal& u,
                                                 const WeightField& alpha, double tol) {
  require_same_grid(f.grid, u.grid, "jump_estimates_report");
  require_same_grid(f.grid, alpha.grid, "jump_estimates_report");
  JumpEstimatesReport rep;
  const double thr_u = std::max(tol, default_jump_threshold(u));
  const double thr_f = std::max(tol, default_jump_threshold(f));
  for (int i = 0; i < f.grid.num_edges(); ++i) {
    JumpEstimateRow row;
    row.edge = i;
    row.x = f.grid.edge(i);
    row.d_u = u.values[i + 1] - u.values[i];
    row.d_f = f.values[i + 1] - f.values[i];
    row.dalpha = alpha.dprime_at(i);
    row.bound_ok = std::abs(row.d_u) <= std::abs(row.d_f) + std::abs(row.dalpha) + tol;
    if (row.dalpha == 0.0 && std::abs(row.d_u) > thr_u && std::abs(row.d_f) > thr_f) {
      row.direction_checked = true;
      row.direction_ok = sgn(row.d_u) * sgn(row.d_f) >= 0;
    }
    rep.all_bounds_ok = rep.all_bounds_ok && row.bound_ok;
    rep.all_directions_ok = rep.all_directions_ok && row.direction_ok;
    rep.rows.push_back(row);
  }
  return rep;
}

struct MonotoneRun {
  bool above = false;  // run of u > f (else u < f)
  int first_cell = 0;
  int last_cell = 0;
  int direction_changes = 0;
  bool pattern_ok = true;  // above: non-increasing then non-decreasing; below mirrored
};

struct RunProfile {
  std::vector<MonotoneRun> runs;
  bool all_ok = true;
};

// Residual-scale of a solved signal: differences below this floor are not
// resolved at the given relative duality gap.
inline double gap_noise_floor(const Grid& g, double rel_gap, double primal) {
  return 4.0 * std::sqrt(2.0 * std::max(rel_gap, 0.0) * (1.0 + std::abs(primal)) / g.h);
}

// Decompose {u > f} and {u < f} (strict beyond the dead band) into maximal
// runs and check the single-dip / single-bump shape of u on each.
inline RunProfile monotone_run_profile(const Signal& f, const Signal& u, double tol,
                                       double direction_threshold = -1.0) {
  require_same_grid(f.grid, u.grid, "monotone_run_profile");
  RunProfile prof;
  const int n = f.grid.n;
  const double dthr =
      direction_threshold >= 0.0 ? direction_threshold : default_jump_threshold(u);
  auto classify = [&](int j) -> int {
    const double diff = u.values[j] - f.values[j];
    if (diff > tol) return 1;
    if (diff < -tol) return -1;
    return 0;
  };
  int j = 0;
  while (j < n) {
    const int c = classify(j);
    if (c == 0) {
      ++j;
      continue;
    }
    int k = j;
    while (k + 1 < n && classify(k + 1) == c) ++k;
    MonotoneRun run;
    run.above = c > 0;
    run.first_cell = j;
    run.last_cell = k;
    int prev = 0;
    for (int i = j; i < k; ++i) {
      const double d = u.values[i + 1] - u.values[i];
      const int s = std::abs(d) > dthr ? sgn(d) : 0;
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++run.direction_changes;
      // above a run the only allowed switch is down -> up; below it is up -> down
      if (prev != 0 && s != prev && !((c > 0 && prev < 0) || (c < 0 && prev > 0))) run.pattern_ok = false;
      prev = s;
    }
    if (run.direction_changes > 1) run.pattern_ok = false;
    prof.all_ok = prof.all_ok && run.pattern_ok;
    prof.runs.push_back(run);
    j = k + 1;
  }
  return prof;
}

// --- Qualitative fixture catalogue -------------------------------------------
//
// Six configurations covering the possible relations between data jumps,
// weight-derivative jumps and solution jumps at the central edge of a
// symmetric grid. Each predicate is machine-checkable on a solved instance.

struct FixtureContext {
  Grid grid;
  Signal f;
  Signal u;
  WeightField alpha;
  int center_edge = 0;
  double jump_threshold = 0.0;

  double du() const { return u.values[center_edge + 1] - u.values[center_edge]; }
  double df() const { return f.values[center_edge + 1] - f.values[center_edge]; }
  double dalpha() const { return alpha.dprime_at(center_edge); }
  double ul() const { return u.values[center_edge]; }
  double ur() const { return u.values[center_edge + 1]; }
  double fl() const { return f.values[center_edge]; }
  double fr() const { return f.values[center_edge + 1]; }
  double h() const { return grid.h; }
};

struct Table1Fixture {
  std::string name;
  std::string description;
  std::function<double(double)> data;
  WeightSpec weight;
  std::function<bool(const FixtureContext&)> predicate;
};

inline std::vector<Table1Fixture> table1_fixtures() {
  std::vector<Table1Fixture> fx;
  // Continuity of sampled data at the central edge: the discrete difference
  // of a ramp is slope * h, not a jump.
  auto data_continuous = [](const FixtureContext& c, double slope_bound) {
    return std::abs(c.df()) <= 3.0 * slope_bound * c.h();
  };

  // Weight kink at the origin; the data consists of balanced wiggle pairs
  // away from the kink, so the dual carries no pressure at 0 and the
  // solution stays continuous while remaining far from constant.
  fx.push_back(Table1Fixture{
      "continuous_despite_kink",
      "positive weight-derivative jump at a point where the solution remains continuous",
      [](double x) {
        if (x > -0.8 && x < -0.6) return 1.0;
        if (x > -0.6 && x < -0.4) return -1.0;
        if (x > 0.4 && x < 0.6) return 1.0;
        if (x > 0.6 && x < 0.8) return -1.0;
        return 0.0;
      },
      abs_weight(0.2, 0.05, 0.0),
      [data_continuous](const FixtureContext& c) {
        return c.dalpha() > 0.0 && data_continuous(c, 0.0) &&
               std::abs(c.du()) <= c.jump_threshold && total_variation(c.u) > 0.1;
      }});

  // Steep kink: a new jump appears but stays strictly below the kink size.
  fx.push_back(Table1Fixture{
      "jump_below_kink",
      "new jump strictly smaller than the weight-derivative jump",
      [](double x) { return 2.0 * x; },
      abs_weight(2.0, 0.3, 0.0),
      [data_continuous](const FixtureContext& c) {
        return data_continuous(c, 2.0) && std::abs(c.du()) > c.jump_threshold &&
               std::abs(c.du()) < c.dalpha() - 0.5;
      }});

  // Mild kink interior to the support of Du: the jump matches the kink size.
  fx.push_back(Table1Fixture{
      "jump_equals_kink",
      "new jump equal to the weight-derivative jump",
      [](double x) { return 2.0 * x; },
      abs_weight(0.2, 0.3, 0.0),
      [data_continuous](const FixtureContext& c) {
        const double band = 2.0 * c.h() * 2.0 + 1e-6;  // slope of the data times 2h
        return data_continuous(c, 2.0) && std::abs(std::abs(c.du()) - c.dalpha()) <= band;
      }});

  // Kink-free weight at a data jump: a rising staircase under a weight that
  // climbs steeply through the jump lifts each interior step by the local
  // slope, pushing the whole solution jump above the data jump.
  fx.push_back(Table1Fixture{
      "jump_above_data",
      "kink-free weight at a data jump with the solution jump above the data jump",
      [](double x) {
        if (x < -0.2) return -1.0;
        if (x < 0.0) return 0.0;
        if (x < 0.25) return 1.0;
        return 3.0;
      },
      pwa_weight({-1.0, -0.03, 1.0}, {0.02, 0.02 + 1.12 * 0.97, 0.02 + 1.12 * (0.97 + 1.03)}),
      [](const FixtureContext& c) {
        return c.dalpha() == 0.0 && c.df() > 0.5 && c.du() > 0.05 && c.ul() > c.fr() + 0.05;
      }});

  // Kink on top of a data jump of the same direction: the jump is enlarged.
  fx.push_back(Table1Fixture{
      "enlarged_same_direction",
      "data jump enlarged by a positive weight-derivative jump, same direction",
      [](double x) { return 2.0 * x + 0.4 * sgn(x); },
      abs_weight(0.2, 0.3, 0.0),
      [](const FixtureContext& c) {
        return c.df() > c.jump_threshold && c.du() > c.df() + 0.1 && c.dalpha() > 0.0;
      }});

  // Kink overpowering a data jump of the opposite direction.
  fx.push_back(Table1Fixture{
      "reversed_direction",
      "solution jump opposite in direction to the data jump",
      [](double x) { return 2.0 * x - 0.3 * sgn(x); },
      abs_weight(0.5, 0.3, 0.0),
      [](const FixtureContext& c) {
        return c.df() < -c.jump_threshold && c.du() > c.jump_threshold &&
               sgn(c.du()) * sgn(c.df()) < 0;
      }});

  return fx;
}

struct FixtureResult {
  std::string name;
  bool pass = false;
  bool converged = false;
};

inline FixtureResult run_table1_fixture(const Table1Fixture& fx, int n,
                                        const SolverOptions& opts = {}) {
  if (n % 2 != 0) throw std::invalid_argument("run_table1_fixture: need even n so an edge sits at 0");
  FixtureContext ctx;
  ctx.grid = make_grid(-1.0, 1.0, n);
  ctx.f = sample(ctx.grid, fx.data);
  ctx.alpha = realize_weight(fx.weight, ctx.grid);
  Solution sol = solve_wtv(ctx.f, ctx.alpha, opts);
  ctx.u = sol.u;
  ctx.center_edge = n / 2 - 1;
  ctx.jump_threshold = std::max(default_jump_threshold(ctx.u), 1e-7);
  FixtureResult r;
  r.name = fx.name;
  r.converged = sol.converged;
  r.pass = sol.converged && fx.predicate(ctx);
  return r;
}

// --- JSON serialization -------------------------------------------------------

inline nlohmann::json to_json(const CertificateReport& r) {
  nlohmann::json j;
  j["residuals"] = {{"boundary", r.boundary_residual},
                    {"linkage", r.linkage_residual},
                    {"box", r.box_violation},
                    {"sign", r.sign_violation}};
  j["tolerances"] = {{"boundary", r.tolerances.boundary},
                     {"linkage", r.tolerances.linkage},
                     {"box", r.tolerances.box},
                     {"sign", r.tolerances.sign},
                     {"jump_threshold", r.tolerances.jump_threshold}};
  j["worst"] = {{"linkage_cell", r.worst_linkage_cell},
                {"box_node", r.worst_box_node},
                {"sign_edge", r.worst_sign_edge}};
  j["conditions"] = {{"boundary", r.boundary_ok},
                     {"linkage", r.linkage_ok},
                     {"box", r.box_ok},
                     {"sign", r.sign_ok}};
  j["pass"] = r.pass();
  return j;
}

inline std::string certificate_table(const CertificateReport& r) {
  auto line = [](const std::string& name, double res, double tol, bool ok) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-10s %12.4e  (tol %10.4e)  %s\n", name.c_str(), res, tol,
                  ok ? "ok" : "VIOLATED");
    return std::string(buf);
  };
  std::string out = "certificate conditions\n";
  out += line("boundary", r.boundary_residual, r.tolerances.boundary, r.boundary_ok);
  out += line("linkage", r.linkage_residual, r.tolerances.linkage, r.linkage_ok);
  out += line("box", r.box_violation, r.tolerances.box, r.box_ok);
  out += line("sign", r.sign_violation, r.tolerances.sign, r.sign_ok);
  out += r.pass() ? "  verdict    PASS\n" : "  verdict    FAIL\n";
  return out;
}

inline nlohmann::json to_json(const JumpEstimatesReport& rep) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    if (r.d_u == 0.0 && r.d_f == 0.0 && r.dalpha == 0.0 && r.bound_ok) continue;
    rows.push_back({{"edge", r.edge},
                    {"x", r.x},
                    {"d_u", r.d_u},
                    {"d_f", r.d_f},
                    {"dalpha", r.dalpha},
                    {"bound_ok", r.bound_ok},
                    {"direction_checked", r.direction_checked},
                    {"direction_ok", r.direction_ok}});
  }
  return nlohmann::json{{"rows", rows},
                        {"all_bounds_ok", rep.all_bounds_ok},
                        {"all_directions_ok", rep.all_directions_ok}};
}

}  // namespace wtv1d
