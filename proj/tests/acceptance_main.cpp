// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Every tolerance is pinned here; desk scale throughout.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "wtv1d/analysis.hpp"
#include "wtv1d/analytic.hpp"
#include "wtv1d/bv.hpp"
#include "wtv1d/corpus.hpp"
#include "wtv1d/fidelity.hpp"
#include "wtv1d/solve.hpp"

using namespace wtv1d;

namespace {

constexpr double kTau = 2.0 * 3.14159265358979323846;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, what.c_str());
  if (!pass) ++g_failures;
}

double gap_floor(double g) { return std::max(g, 2.2e-16); }

// 1. closed-form equivalence across all three regimes at n = 4096
void criterion1() {
  const int n = 4096;
  const Grid g = make_grid(-1.0, 1.0, n);
  struct Triple {
    double lambda, mu, c;
  };
  const std::vector<Triple> triples = {
      // ramps with plateaus and a central jump
      {2.0, 0.2, 0.3}, {2.0, 0.1, 0.1}, {2.0, 0.35, 0.2}, {1.0, 0.1, 0.2}, {1.0, 0.05, 0.3},
      {3.0, 0.5, 0.4}, {3.0, 0.2, 0.8}, {2.0, 0.45, 0.05},
      // pure steps
      {2.0, 1.0, 0.5}, {2.0, 0.8, 0.4}, {1.0, 0.5, 0.2}, {1.0, 0.45, 0.1}, {3.0, 1.4, 0.5},
      {2.0, 2.0, 0.3},
      // flattened to zero
      {2.0, 0.7, 1.2}, {2.0, 0.1, 1.0}, {1.0, 0.3, 0.6}, {1.0, 1.0, 0.7}, {3.0, 0.2, 1.6},
      {2.0, 3.0, 1.1}};

  int regimes_seen[3] = {0, 0, 0};
  bool pass = true;
  std::string detail;
  for (const auto& t : triples) {
    const auto [oracle, kase] = affine_abs_solution(1.0, t.lambda, t.mu, t.c, g);
    ++regimes_seen[static_cast<int>(kase.regime)];
    const Signal f = sample(g, [&](double x) { return t.lambda * x; });
    const Solution sol = solve_wtv(f, realize_weight(abs_weight(t.mu, t.c, 0.0), g));
    if (!sol.converged) {
      pass = false;
      detail = "solver did not converge";
      break;
    }
    double off_center = 0.0;
    for (int j = 0; j < n; ++j) {
      if (std::abs(g.cell_center(j)) < 2.0 * g.h) continue;
      off_center = std::max(off_center, std::abs(sol.u.values[j] - oracle.values[j]));
    }
    const double du = sol.u.values[n / 2] - sol.u.values[n / 2 - 1];
    const double jump_band = 2.0 * g.h * t.lambda + 1e-6;
    if (off_center > 5.0 * g.h * (t.lambda + t.mu) ||
        std::abs(std::abs(du) - kase.jump_size) > jump_band) {
      pass = false;
      char buf[160];
      std::snprintf(buf, sizeof(buf), "mismatch at lambda=%g mu=%g c=%g (off=%.2e, jump err=%.2e)",
                    t.lambda, t.mu, t.c, off_center, std::abs(std::abs(du) - kase.jump_size));
      detail = buf;
      break;
    }
  }
  pass = pass && regimes_seen[0] > 0 && regimes_seen[1] > 0 && regimes_seen[2] > 0;
  if (detail.empty())
    detail = "20 triples vs closed forms at n=4096, off-center <= 5h(lambda+mu), jumps within "
             "2h lambda + 1e-6";
  report(1, pass, detail);
}

// 2. certificate soundness: pass on converged solves, fail on plateau-cell
//    perturbations of 1e-4 scale, 100/100
void criterion2() {
  std::mt19937_64 rng(101);
  const Grid g = make_grid(-1.0, 1.0, 256);
  int passes = 0, detections = 0, total = 0;
  while (total < 100) {
    const Signal f = random_piecewise_signal(rng, g, 8);
    if (value_range(f) < 0.1) continue;  // degenerate data carries no certificate signal
    const WeightField alpha = realize_weight(random_weight_spec(rng, g, value_range(f), false), g);
    const Solution sol = solve_wtv(f, alpha);
    if (!sol.converged) continue;

    // locate a cell inside a flat run
    const JumpReport jumps = jump_set(sol.u);
    int cell = -1;
    for (int j = 2; j + 2 < g.n; ++j) {
      bool near = false;
      for (const auto& r : jumps.jumps) near = near || std::abs(r.edge - j) <= 1;
      if (!near) {
        cell = j;
        break;
      }
    }
    if (cell < 0) continue;
    ++total;
    if (verify_kkt(f, sol.u, alpha, KktMode::wtv).pass()) ++passes;
    Signal bad = sol.u;
    bad.values[cell] += 1e-4 * std::max(1.0, value_range(f));
    if (!verify_kkt(f, bad, alpha, KktMode::wtv).pass()) ++detections;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "converged solves pass %d/100, plateau perturbations detected %d/100", passes,
                detections);
  report(2, passes == 100 && detections == 100, buf);
}

// 3. total variation of the solution bounded by that of the data: 1000
//    randomized pairs including vanishing weights
void criterion3() {
  std::mt19937_64 rng(333);
  const Grid g = make_grid(-1.0, 1.0, 256);
  int violations = 0, nonconv = 0;
  double worst = -1e300;
  for (int t = 0; t < 1000; ++t) {
    const Signal f = random_piecewise_signal(rng, g, 8);
    const WeightField alpha = realize_weight(random_weight_spec(rng, g, value_range(f), true), g);
    const Solution sol = solve_wtv(f, alpha);
    if (!sol.converged) {
      ++nonconv;
      continue;
    }
    const double slack = 1e-8 * (1.0 + total_variation(f));
    const TvBoundResult r = tv_bound_check(f, sol.u, slack);
    if (!r.holds) ++violations;
    worst = std::max(worst, -r.margin);
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "1000 pairs, %d violations, %d non-converged, worst excess %.2e", violations,
                nonconv, worst);
  report(3, violations == 0 && nonconv == 0, buf);
}

// 4. partial semigroup: 50 randomized compositions agree; the reversed-order
//    configuration does not
void criterion4() {
  std::mt19937_64 rng(44);
  const Grid g = make_grid(-1.0, 1.0, 512);
  bool pass = true;
  double worst_ratio = 0.0;
  for (int t = 0; t < 50 && pass; ++t) {
    const Signal f = random_piecewise_signal(rng, g, 6);
    WeightSpec spec = random_weight_spec(rng, g, value_range(f), false);
    const double alpha2 = uniform(rng, 0.05, 0.5);
    const SemigroupResult sg = semigroup_compose(f, realize_weight(spec, g), alpha2);
    if (!sg.all_converged()) {
      pass = false;
      break;
    }
    double tol = 0.0;
    for (const Solution* s : {&sg.one_shot, &sg.intermediate, &sg.two_step})
      tol += std::sqrt(2.0 * gap_floor(s->gap) * (1.0 + std::abs(objective_wtv(f, realize_weight(spec, g), s->u))) / g.h);
    worst_ratio = std::max(worst_ratio, sg.distance / (10.0 * tol));
    if (sg.distance > 10.0 * tol) pass = false;
  }

  // reversed order: scalar smoothing first, then a V kink inside the
  // flattened region
  const Signal step = sample(g, [](double x) { return static_cast<double>(sgn(x)); });
  const WeightField vee = realize_weight(abs_weight(0.5, 0.05, 0.3), g);
  const Solution us = solve_wtv(step, realize_weight(scalar_weight(0.3), g));
  const Solution rev = solve_wtv(us.u, vee);
  const Solution one = solve_wtv(step, vee.with_added(0.3));
  double rev_tol = 0.0;
  for (const Solution* s : {&us, &rev, &one})
    rev_tol += std::sqrt(2.0 * gap_floor(s->gap) * 2.0 / g.h);
  const double rev_dist = linf_distance(one.u, rev.u);
  const bool rev_ok = rev_dist >= 100.0 * rev_tol;

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "50 compositions within 10x gap tolerance (worst ratio %.2e); reversed order "
                "differs by %.3f >= 100x tolerance",
                worst_ratio, rev_dist);
  report(4, pass && rev_ok, buf);
}

// 5. the six qualitative fixtures at n = 2048
void criterion5() {
  bool pass = true;
  std::string names;
  for (const auto& fx : table1_fixtures()) {
    const FixtureResult r = run_table1_fixture(fx, 2048);
    if (!r.pass) {
      pass = false;
      names += (names.empty() ? "" : ", ") + r.name;
    }
  }
  report(5, pass, pass ? "all six qualitative fixtures hold at n=2048" : "failing: " + names);
}

// 6. exact piecewise-constant recovery with tent weights; scalar baseline
//    loses contrast
void criterion6() {
  const Grid g = make_grid(-1.0, 1.0, 1024);
  const Signal f0 = sample(g, [](double x) { return static_cast<double>(sgn(x)); });
  const Signal f =
      sample(g, [](double x) { return static_cast<double>(sgn(x)) + 0.3 * std::sin(kTau * x); });
  const double scale = value_range(f0);

  const WeightSpec tent = pc_exact_weight({-1.0, 0.0, 1.0}, 1.3, 1.2);
  const Solution sol = solve_wtv(f, realize_weight(tent, g));
  const double err = linf_distance(sol.u, f0);

  // smallest scalar weight that flattens both intervals, by bisection
  double lo = 0.0, hi = 2.0 * value_range(f) * g.length();
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Solution s = solve_wtv(f, realize_weight(scalar_weight(mid), g));
    bool flat = true;
    for (int j = 0; j + 1 < g.n && flat; ++j) {
      if (j == g.n / 2 - 1) continue;  // the data jump edge
      if (std::abs(s.u.values[j + 1] - s.u.values[j]) > 1e-6 * scale) flat = false;
    }
    (flat ? hi : lo) = mid;
  }
  const Solution base = solve_wtv(f, realize_weight(scalar_weight(hi), g));
  const double contrast_loss = value_range(f0) - value_range(base.u);

  char buf[160];
  std::snprintf(buf, sizeof(buf), "recovery sup-error %.2e <= 1e-6 scale; scalar contrast loss %.3f >= h",
                err, contrast_loss);
  report(6, sol.converged && err <= 1e-6 * scale && contrast_loss >= g.h, buf);
}

// 7. weighted-fidelity structure: clamp form, constancy prediction, recovery
//    levels
void criterion7() {
  const Grid g = make_grid(-1.0, 1.0, 384);
  const double lambda = 2.0;
  const Signal f = sample(g, [&](double x) { return lambda * x; });
  std::mt19937_64 rng(777);

  int clamp_ok = 0;
  for (int t = 0; t < 20; ++t) {
    const WeightField w = cell_weight_field(g, random_fid_cells(rng, g, 2.5));
    const FidSolution sol = solve_wfid(f, w);
    if (sol.converged && clamp_form_check(sol.u, f, 25.0 * g.h).is_clamp) ++clamp_ok;
  }

  // constructed constancy cases: mass concentrated near the left end, scaled
  // so the far-side potential is below -1 while the near side stays above
  int constancy_ok = 0;
  for (int t = 0; t < 20; ++t) {
    const double width = uniform(rng, 0.05, 0.3);
    std::vector<double> w(g.n, 0.0);
    double target = uniform(rng, 1.1, 3.0);
    // phi1(b) = -lambda * height * integral over the strip of (b - s)
    double integral = 0.0;
    for (int j = 0; j < g.n; ++j)
      if (g.cell_center(j) < g.a + width) integral += g.h * (g.b - g.cell_center(j));
    const double height = target / (lambda * integral);
    for (int j = 0; j < g.n; ++j)
      if (g.cell_center(j) < g.a + width) w[j] = height;

    if (!(fid_phi1(g, w, lambda, g.b) <= -1.0)) continue;
    if (!(fid_phi2(g, w, lambda, g.a) > -1.0)) continue;
    const FidConstancy pred = fid_constancy(g, w, lambda);
    const FidSolution sol = solve_wfid(f, cell_weight_field(g, w));
    const bool constant = value_range(sol.u) <= 30.0 * g.h * lambda;
    if (pred.constant_predicted && sol.converged && constant) ++constancy_ok;
  }

  const Grid gr = make_grid(-1.0, 1.0, 512);
  const auto pts = pc_limit_recovery(
      [](double x) { return static_cast<double>(sgn(x)); },
      [](double x) { return 0.2 * x * (1.0 - std::abs(x)) * std::sin(3.0 * kTau * x); }, {0.0},
      {4, 8, 16, 32}, gr);
  bool levels_ok = true;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    levels_ok = levels_ok && pts[k + 1].sup_error <= pts[k].sup_error + 1e-12;
  levels_ok = levels_ok && pts.back().sup_error <= 0.5 * pts.front().sup_error;

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "clamp form %d/20; constancy predicted and observed %d/20; recovery errors "
                "non-increasing with final <= half initial (%s)",
                clamp_ok, constancy_ok, levels_ok ? "yes" : "no");
  report(7, clamp_ok == 20 && constancy_ok == 20 && levels_ok, buf);
}

// 8. the regularizer-weighted problem never produces an asymmetric clamp on
//    affine data
void criterion8() {
  const Grid g = make_grid(-1.0, 1.0, 1024);
  const double lambda = 2.0;
  const Signal f = sample(g, [&](double x) { return lambda * x; });
  std::mt19937_64 rng(888);
  int solved = 0, asymmetric = 0;
  for (int t = 0; t < 40; ++t) {
    const WeightField alpha = realize_weight(random_weight_spec(rng, g, 2.0, true), g);
    const Solution sol = solve_wtv(f, alpha);
    if (!sol.converged) continue;
    ++solved;
    const ClampForm cf = clamp_form_check(sol.u, f, 5.0 * g.h * lambda);
    if (!cf.is_clamp) continue;
    const bool strictly_inside = cf.x1 > g.a + g.h && cf.x2 < g.b - g.h && cf.x1 < cf.x2;
    if (strictly_inside && std::abs(cf.x1 + cf.x2) > 10.0 * g.h) ++asymmetric;
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d solves on affine data, %d asymmetric clamps (|x1+x2| > 10h)",
                solved, asymmetric);
  report(8, solved == 40 && asymmetric == 0, buf);
}

// 9. vanishing-weight floors form a Cauchy-like sequence
void criterion9() {
  const Grid g = make_grid(-1.0, 1.0, 512);
  const Signal f =
      sample(g, [](double x) { return static_cast<double>(sgn(x)) + 0.3 * std::sin(kTau * x); });
  const WeightField tent = realize_weight(pc_exact_weight({-1.0, 0.0, 1.0}, 1.3, 1.2), g);
  const auto res = vanishing_weight_limit(f, tent, {1e-1, 1e-2, 1e-3, 1e-4});
  bool conv = true;
  for (const auto& e : res.entries) conv = conv && e.solution.converged;
  bool monotone = true;
  for (std::size_t k = 0; k + 1 < res.successive_distances.size(); ++k)
    monotone = monotone && res.successive_distances[k + 1] <= res.successive_distances[k];
  char buf[200];
  std::snprintf(buf, sizeof(buf), "successive distances %.3e, %.3e, %.3e decrease monotonically",
                res.successive_distances[0], res.successive_distances[1],
                res.successive_distances[2]);
  report(9, conv && monotone, buf);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (g_failures == 0) std::printf("acceptance: all 9 criteria pass\n");
  else std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
