// wtv1d command line: solve the weighted problems, verify certificates, run
// the property suites, sweep the weight-parameter plane, and reproduce the
// piecewise-constant recovery experiments.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wtv1d/analysis.hpp"
#include "wtv1d/analytic.hpp"
#include "wtv1d/bv.hpp"
#include "wtv1d/corpus.hpp"
#include "wtv1d/fidelity.hpp"
#include "wtv1d/io.hpp"
#include "wtv1d/solve.hpp"
#include "wtv1d/svg.hpp"
#include "wtv1d/weights.hpp"

using nlohmann::json;
using namespace wtv1d;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNoConverge = 3;
constexpr int kExitVerification = 4;

int log_level() {
  const char* env = std::getenv("WTV1D_LOG");
  if (!env) return 0;
  const std::string s(env);
  if (s == "debug" || s == "2") return 2;
  if (s == "info" || s == "1") return 1;
  return 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[wtv1d] " << msg << "\n";
}

struct CommonOpts {
  std::vector<double> grid;  // a b n
  std::string out = ".";
  std::string format = "csv,json";
  double tol = 1e-10;
  int max_iters = 400000;
  int jobs = 1;
  std::uint64_t seed = 1;
  bool no_polish = false;
  std::string step_rule = "fista-restart";
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--grid", c.grid, "grid as A B N")->expected(3);
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--format", c.format, "comma list of csv,json,svg");
  cmd->add_option("--tol", c.tol, "relative duality-gap tolerance");
  cmd->add_option("--max-iters", c.max_iters, "iteration cap");
  cmd->add_option("--jobs", c.jobs, "worker threads for sweeps");
  cmd->add_option("--seed", c.seed, "seed for randomized suites");
  cmd->add_flag("--no-polish", c.no_polish, "disable the exact refinement step");
  cmd->add_option("--step-rule", c.step_rule, "fista-restart, fista or gradient");
}

SolverOptions solver_options(const CommonOpts& c) {
  SolverOptions o;
  o.gap_tolerance = c.tol;
  o.max_iterations = c.max_iters;
  o.polish = !c.no_polish;
  if (c.step_rule == "fista-restart") o.step_rule = StepRule::fista_restart;
  else if (c.step_rule == "fista") o.step_rule = StepRule::fista;
  else if (c.step_rule == "gradient") o.step_rule = StepRule::gradient;
  else throw std::invalid_argument("unknown step rule '" + c.step_rule + "'");
  return o;
}

bool wants(const CommonOpts& c, const char* fmt) {
  return ("," + c.format + ",").find("," + std::string(fmt) + ",") != std::string::npos;
}

std::optional<Grid> grid_override(const CommonOpts& c) {
  if (c.grid.empty()) return std::nullopt;
  return make_grid(c.grid[0], c.grid[1], static_cast<int>(std::lround(c.grid[2])));
}

std::string out_file(const CommonOpts& c, const char* name) {
  std::filesystem::create_directories(c.out);
  return (std::filesystem::path(c.out) / name).string();
}

// Weight argument: inline JSON or the shorthand forms
// scalar:V and abs:MU:C[:X0].
WeightSpec parse_weight_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return weight_spec_from_json(json::parse(arg));
  std::vector<std::string> parts;
  std::stringstream in(arg);
  std::string tok;
  while (std::getline(in, tok, ':')) parts.push_back(tok);
  if (parts.empty()) throw std::invalid_argument("empty weight spec");
  if (parts[0] == "scalar" && parts.size() == 2)
    return scalar_weight(parse_double(parts[1], "weight"));
  if (parts[0] == "abs" && (parts.size() == 3 || parts.size() == 4))
    return abs_weight(parse_double(parts[1], "weight"), parse_double(parts[2], "weight"),
                      parts.size() == 4 ? parse_double(parts[3], "weight") : 0.0);
  throw std::invalid_argument("cannot parse weight spec '" + arg +
                              "' (expected JSON, scalar:V or abs:MU:C[:X0])");
}

json grid_json(const Grid& g) { return json{{"a", g.a}, {"b", g.b}, {"n", g.n}, {"h", g.h}}; }

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open '" + path + "'");
  out << j.dump(2) << "\n";
}

// piecewise-constant target: {"breaks":[...interior...], "values":[...]}
Signal parse_pc_signal(const json& j, const Grid& g, std::vector<double>& breaks_out) {
  const auto breaks = j.at("breaks").get<std::vector<double>>();
  const auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != breaks.size() + 1)
    throw std::invalid_argument("pc signal: need one more value than breaks");
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    if (!(breaks[k] > g.a && breaks[k] < g.b))
      throw std::invalid_argument("pc signal: break outside the domain");
    if (k > 0 && !(breaks[k] > breaks[k - 1]))
      throw std::invalid_argument("pc signal: breaks must increase");
  }
  breaks_out = breaks;
  return sample(g, [&](double x) {
    std::size_t k = 0;
    while (k < breaks.size() && x >= breaks[k]) ++k;
    return values[k];
  });
}

// noise: {"kind":"none"} | {"kind":"sine","amp":A,"freq":F}
//        | {"kind":"tapersine","amp":A,"freq":F}  (amp x (1-|x|) sin(2 pi F x))
std::function<double(double)> parse_noise(const json& j) {
  const std::string kind = j.value("kind", "none");
  if (kind == "none") return [](double) { return 0.0; };
  const double amp = j.at("amp").get<double>();
  const double freq = j.at("freq").get<double>();
  constexpr double tau = 2.0 * 3.14159265358979323846;
  if (kind == "sine") return [=](double x) { return amp * std::sin(tau * freq * x); };
  if (kind == "tapersine")
    return [=](double x) { return amp * x * (1.0 - std::abs(x)) * std::sin(tau * freq * x); };
  throw std::invalid_argument("unknown noise kind '" + kind + "'");
}

// ---------------------------------------------------------------------------

int cmd_solve(const std::string& mode, const std::string& f_path, const std::string& alpha_arg,
              const std::string& w_path, const CommonOpts& c) {
  const Signal f = read_signal_csv(f_path, grid_override(c));
  const Grid& g = f.grid;
  const SolverOptions opts = solver_options(c);

  json report;
  report["mode"] = mode;
  report["grid"] = grid_json(g);
  report["solver"] = {{"gap_tolerance", opts.gap_tolerance}, {"max_iterations", opts.max_iterations}};

  Signal u{g, {}};
  std::vector<double> v;
  bool converged = false;

  if (mode == "wtv") {
    if (alpha_arg.empty()) throw std::invalid_argument("solve wtv: --alpha is required");
    const WeightSpec spec = parse_weight_arg(alpha_arg);
    const WeightField alpha = realize_weight(spec, g);
    const Solution sol = solve_wtv(f, alpha, opts);
    u = sol.u;
    v = sol.v;
    converged = sol.converged;
    report["weight"] = to_json(spec);
    report["gap"] = sol.gap;
    report["iterations"] = sol.iterations;
    report["objective"] = objective_wtv(f, alpha, sol.u);
    report["dual_objective"] = dual_objective(f, alpha, sol.v);
    if (wants(c, "svg")) write_solution_svg(out_file(c, "plot.svg"), f, u, v, alpha, true);
  } else if (mode == "wfid") {
    if (w_path.empty()) throw std::invalid_argument("solve wfid: --w is required");
    const Signal wsig = read_signal_csv(w_path, g);
    const WeightField w = cell_weight_field(g, wsig.values);
    const FidSolution sol = solve_wfid(f, w, opts);
    u = sol.u;
    v = sol.v;
    converged = sol.converged;
    report["gap"] = sol.gap;
    report["iterations"] = sol.iterations;
    report["floor_used"] = sol.floor_used;
    report["objective"] = objective_wfid(f, floored_cells(w, sol.floor_used), sol.u);
    if (wants(c, "svg")) write_solution_svg(out_file(c, "plot.svg"), f, u, v, w, false);
  } else {
    throw std::invalid_argument("solve: mode must be wtv or wfid");
  }

  report["converged"] = converged;
  report["tv_f"] = total_variation(f);
  report["tv_u"] = total_variation(u);
  if (wants(c, "csv")) {
    write_signal_csv(out_file(c, "u.csv"), u);
    write_nodes_csv(out_file(c, "v.csv"), g, v);
  }
  if (wants(c, "json")) write_json(out_file(c, "report.json"), report);
  log_info("solve " + mode + (converged ? " converged" : " did NOT converge"));
  return converged ? kExitOk : kExitNoConverge;
}

int cmd_verify(const std::string& mode, const std::string& f_path, const std::string& u_path,
               const std::string& alpha_arg, const std::string& w_path, const CommonOpts& c) {
  const Signal f = read_signal_csv(f_path, grid_override(c));
  const Signal u = read_signal_csv(u_path, f.grid);

  WeightField weight;
  KktMode mode_tag;
  json weight_json;
  if (mode == "wtv") {
    if (alpha_arg.empty()) throw std::invalid_argument("verify wtv: --alpha is required");
    const WeightSpec spec = parse_weight_arg(alpha_arg);
    weight = realize_weight(spec, f.grid);
    weight_json = to_json(spec);
    mode_tag = KktMode::wtv;
  } else if (mode == "wfid") {
    if (w_path.empty()) throw std::invalid_argument("verify wfid: --w is required");
    weight = cell_weight_field(f.grid, read_signal_csv(w_path, f.grid).values);
    mode_tag = KktMode::wfid;
  } else {
    throw std::invalid_argument("verify: mode must be wtv or wfid");
  }

  const CertificateReport rep = verify_kkt(f, u, weight, mode_tag);
  std::cout << certificate_table(rep);
  if (!rep.pass()) {
    if (!rep.sign_ok)
      std::cout << "  worst sign violation at edge " << rep.worst_sign_edge << " (x = "
                << format_double(f.grid.edge(rep.worst_sign_edge)) << ")\n";
    if (!rep.box_ok) std::cout << "  worst box violation at node " << rep.worst_box_node << "\n";
  }
  json report = to_json(rep);
  report["mode"] = mode;
  if (!weight_json.is_null()) report["weight"] = weight_json;
  if (wants(c, "json")) write_json(out_file(c, "verify.json"), report);
  return rep.pass() ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------

struct SuiteResult {
  std::string name;
  bool pass = false;
  json details;
};

SuiteResult run_fixture_suite(int n, const CommonOpts& c) {
  SuiteResult r;
  r.name = "table1";
  r.pass = true;
  json rows = json::array();
  for (const auto& fx : table1_fixtures()) {
    const FixtureResult fr = run_table1_fixture(fx, n, solver_options(c));
    std::cout << (fr.pass ? "[PASS] " : "[FAIL] ") << "fixture " << fr.name << "\n";
    rows.push_back({{"name", fr.name}, {"pass", fr.pass}, {"converged", fr.converged}});
    r.pass = r.pass && fr.pass;
  }
  r.details = {{"n", n}, {"fixtures", rows}};
  return r;
}

SuiteResult run_random_suite(int count, int n, const CommonOpts& c) {
  SuiteResult r;
  r.name = "random";
  std::mt19937_64 rng(c.seed);
  const Grid g = make_grid(-1.0, 1.0, n);
  int tv_fail = 0, mp_fail = 0, cert_fail = 0, jump_fail = 0, run_fail = 0, nonconv = 0;
  for (int t = 0; t < count; ++t) {
    const Signal f = random_piecewise_signal(rng, g, 8);
    const double scale = std::max(1.0, value_range(f));
    const WeightField alpha = realize_weight(random_weight_spec(rng, g, value_range(f), true), g);
    const Solution sol = solve_wtv(f, alpha, solver_options(c));
    if (!sol.converged) {
      ++nonconv;
      continue;
    }
    if (!tv_bound_check(f, sol.u, 1e-8 * (1.0 + total_variation(f))).holds) ++tv_fail;
    if (!maximum_principle_check(f, sol.u, 1e-8 * scale).holds) ++mp_fail;
    if (!verify_kkt(f, sol.u, alpha, KktMode::wtv).pass()) ++cert_fail;
    const JumpEstimatesReport je = jump_estimates_report(f, sol.u, alpha, 1e-6 * scale);
    if (!je.all_bounds_ok || !je.all_directions_ok) ++jump_fail;
    const double dthr = std::max(default_jump_threshold(sol.u),
                                 gap_noise_floor(g, sol.gap, objective_wtv(f, alpha, sol.u)));
    if (!monotone_run_profile(f, sol.u, 10.0 * dthr, dthr).all_ok) ++run_fail;
  }
  r.pass = tv_fail + mp_fail + cert_fail + jump_fail + run_fail + nonconv == 0;
  r.details = {{"count", count},
               {"n", n},
               {"tv_bound_failures", tv_fail},
               {"max_principle_failures", mp_fail},
               {"certificate_failures", cert_fail},
               {"jump_estimate_failures", jump_fail},
               {"run_profile_failures", run_fail},
               {"non_converged", nonconv}};
  std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "random campaign (" << count
            << " instances): " << r.details.dump() << "\n";
  return r;
}

SuiteResult run_semigroup_suite(const std::string& alpha1_arg, double alpha2, int n,
                                const CommonOpts& c) {
  SuiteResult r;
  r.name = "semigroup";
  const Grid g = make_grid(-1.0, 1.0, n);
  const Signal f = sample(g, [](double x) { return 2.0 * x; });
  const WeightSpec spec = parse_weight_arg(alpha1_arg.empty() ? "abs:0.2:0.3" : alpha1_arg);
  const SemigroupResult sg = semigroup_compose(f, realize_weight(spec, g), alpha2, solver_options(c));
  const double tol_unit = std::sqrt(
      2.0 * c.tol * (1.0 + std::abs(objective_wtv(f, realize_weight(spec, g), sg.one_shot.u))) / g.h);
  const bool fwd_ok = sg.all_converged() && sg.distance <= 10.0 * 3.0 * tol_unit;

  // reversed order on step data: scalar first, then a V kink placed inside a
  // region the scalar solve flattened away from the data
  const Signal step = sample(g, [](double x) { return static_cast<double>(sgn(x)); });
  const WeightField vee = realize_weight(abs_weight(0.5, 0.05, 0.3), g);
  const Solution us = solve_wtv(step, realize_weight(scalar_weight(0.3), g), solver_options(c));
  const Solution rev = solve_wtv(us.u, vee, solver_options(c));
  const Solution one = solve_wtv(step, vee.with_added(0.3), solver_options(c));
  const double rev_dist = linf_distance(one.u, rev.u);
  const bool rev_ok = rev_dist >= 100.0 * 3.0 * tol_unit;

  r.pass = fwd_ok && rev_ok;
  r.details = {{"forward_distance", sg.distance},
               {"reversed_distance", rev_dist},
               {"tolerance_unit", 3.0 * tol_unit}};
  std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "semigroup: forward "
            << format_double(sg.distance) << ", reversed " << format_double(rev_dist) << "\n";
  return r;
}

SuiteResult run_vanishing_suite(int n, const CommonOpts& c) {
  SuiteResult r;
  r.name = "vanishing";
  const Grid g = make_grid(-1.0, 1.0, n);
  constexpr double tau = 2.0 * 3.14159265358979323846;
  const Signal f =
      sample(g, [&](double x) { return static_cast<double>(sgn(x)) + 0.3 * std::sin(tau * x); });
  const WeightField tent = realize_weight(pc_exact_weight({-1.0, 0.0, 1.0}, 1.3, 1.2), g);
  const auto res = vanishing_weight_limit(f, tent, {1e-1, 1e-2, 1e-3, 1e-4}, solver_options(c));
  bool conv = true;
  for (const auto& e : res.entries) conv = conv && e.solution.converged;
  bool dist_monotone = true;
  for (std::size_t k = 0; k + 1 < res.successive_distances.size(); ++k)
    dist_monotone = dist_monotone && res.successive_distances[k + 1] <= res.successive_distances[k];
  bool obj_monotone = true;
  for (std::size_t k = 0; k + 1 < res.objectives.size(); ++k)
    obj_monotone = obj_monotone && res.objectives[k + 1] <= res.objectives[k] + 1e-12;
  r.pass = conv && dist_monotone && obj_monotone;
  r.details = {{"successive_distances", res.successive_distances}, {"objectives", res.objectives}};
  std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << "vanishing-weight floors\n";
  return r;
}

int cmd_properties(bool fixtures, int random_count, bool semigroup, bool vanishing,
                   const std::string& alpha1, double alpha2, int n, const CommonOpts& c) {
  const bool any = fixtures || random_count > 0 || semigroup || vanishing;
  std::vector<SuiteResult> suites;
  if (fixtures || !any) suites.push_back(run_fixture_suite(n > 0 ? n : 2048, c));
  if (random_count > 0 || !any)
    suites.push_back(run_random_suite(random_count > 0 ? random_count : 100, n > 0 ? n : 192, c));
  if (semigroup || !any) suites.push_back(run_semigroup_suite(alpha1, alpha2, n > 0 ? n : 512, c));
  if (vanishing || !any) suites.push_back(run_vanishing_suite(n > 0 ? n : 512, c));

  json agg;
  agg["suites"] = json::array();
  bool pass = true;
  for (const auto& s : suites) {
    agg["suites"].push_back({{"name", s.name}, {"pass", s.pass}, {"details", s.details}});
    pass = pass && s.pass;
  }
  agg["pass"] = pass;
  if (wants(c, "json")) write_json(out_file(c, "properties.json"), agg);
  return pass ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------

int cmd_sweep(const std::string& mu_range, const std::string& c_range, double lambda, double L,
              int n, const CommonOpts& c) {
  auto parse_range = [](const std::string& s) {
    std::vector<double> parts;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ':')) parts.push_back(parse_double(tok, "range"));
    if (parts.size() != 3 || parts[2] < 1) throw std::invalid_argument("range must be lo:hi:steps");
    std::vector<double> out;
    const int steps = static_cast<int>(parts[2]);
    for (int k = 0; k < steps; ++k)
      out.push_back(steps == 1 ? parts[0] : parts[0] + (parts[1] - parts[0]) * k / (steps - 1.0));
    return out;
  };
  const std::vector<double> mus = parse_range(mu_range);
  const std::vector<double> cs = parse_range(c_range);
  const Grid g = make_grid(-L, L, n);
  const Signal f = sample(g, [&](double x) { return lambda * x; });

  struct Row {
    double mu, c;
    int regime;
    double jump_analytic, plateau_analytic, jump_solved, plateau_solved;
    bool converged;
  };
  std::vector<Row> rows(mus.size() * cs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= rows.size()) return;
      const double mu = mus[idx / cs.size()];
      const double cc = cs[idx % cs.size()];
      const AffineAbsCase k =
          classify_affine_abs(L, lambda, std::max(mu, 1e-12), std::max(cc, 1e-12));
      const Solution sol =
          solve_wtv(f, realize_weight(abs_weight(mu, cc, 0.0), g), solver_options(c));
      Row r;
      r.mu = mu;
      r.c = cc;
      r.regime = static_cast<int>(k.regime);
      r.jump_analytic = k.jump_size;
      r.plateau_analytic = k.plateau_value;
      r.jump_solved = sol.u.values[g.n / 2] - sol.u.values[g.n / 2 - 1];
      r.plateau_solved = sol.u.values[g.n - 1];
      r.converged = sol.converged;
      rows[idx] = r;
    }
  };
  const int jobs = std::max(1, c.jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ofstream csv(out_file(c, "sweep.csv"));
  csv << "mu,c,regime,jump_analytic,plateau_analytic,jump_solved,plateau_solved,converged\n";
  std::vector<int> regimes;
  bool all_conv = true;
  for (const auto& r : rows) {
    csv << format_double(r.mu) << ',' << format_double(r.c) << ',' << r.regime << ','
        << format_double(r.jump_analytic) << ',' << format_double(r.plateau_analytic) << ','
        << format_double(r.jump_solved) << ',' << format_double(r.plateau_solved) << ','
        << (r.converged ? 1 : 0) << '\n';
    regimes.push_back(r.regime);
    all_conv = all_conv && r.converged;
  }
  if (wants(c, "svg")) write_regime_map_svg(out_file(c, "regime_map.svg"), mus, cs, regimes);
  if (wants(c, "json"))
    write_json(out_file(c, "sweep.json"),
               json{{"mu_count", mus.size()},
                    {"c_count", cs.size()},
                    {"n", n},
                    {"lambda", lambda},
                    {"L", L},
                    {"all_converged", all_conv}});
  return all_conv ? kExitOk : kExitNoConverge;
}

// ---------------------------------------------------------------------------

int cmd_recover_pc(const std::string& model, const std::string& f0_arg, const std::string& noise_arg,
                   const std::string& levels_arg, double margin, int n, const CommonOpts& c) {
  const Grid g = grid_override(c).value_or(make_grid(-1.0, 1.0, n));
  std::vector<double> breaks;
  const Signal f0 = parse_pc_signal(json::parse(f0_arg), g, breaks);
  const auto noise = parse_noise(noise_arg.empty() ? json{{"kind", "none"}} : json::parse(noise_arg));
  const Signal eta = sample(g, noise);
  Signal data = f0;
  for (int j = 0; j < g.n; ++j) data.values[j] += eta.values[j];
  const double scale = std::max(1.0, value_range(data));

  json report;
  report["model"] = model;
  report["grid"] = grid_json(g);

  if (model == "wtv") {
    // the per-interval mean of the noise must vanish
    std::vector<double> pts{g.a};
    for (double b : breaks) pts.push_back(b);
    pts.push_back(g.b);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      double acc = 0.0;
      int cells = 0;
      for (int j = 0; j < g.n; ++j) {
        const double x = g.cell_center(j);
        if (x > pts[k] && x < pts[k + 1]) {
          acc += eta.values[j] * g.h;
          ++cells;
        }
      }
      if (cells > 0 && std::abs(acc) > 1e-8 * scale * (pts[k + 1] - pts[k]))
        throw std::invalid_argument("recover-pc: noise is not zero-mean on every interval");
    }
    const WeightSpec spec = pc_exact_weight(pts, std::max(1e-12, max_abs(data.values)), margin);
    const Solution sol = solve_wtv(data, realize_weight(spec, g), solver_options(c));
    const double err = linf_distance(sol.u, f0);
    report["weight"] = to_json(spec);
    report["sup_error"] = err;
    report["converged"] = sol.converged;

    // scalar baseline: bisect the smallest weight that flattens every interval
    double lo = 0.0, hi = 2.0 * value_range(data) * g.length();
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Solution s = solve_wtv(data, realize_weight(scalar_weight(mid), g), solver_options(c));
      bool flat = true;
      for (std::size_t k = 0; k + 1 < pts.size() && flat; ++k)
        for (int j = 0; j + 1 < g.n; ++j) {
          const double xl = g.cell_center(j), xr = g.cell_center(j + 1);
          if (xl > pts[k] && xr < pts[k + 1] &&
              std::abs(s.u.values[j + 1] - s.u.values[j]) > 1e-6 * scale)
            flat = false;
        }
      (flat ? hi : lo) = mid;
    }
    const Solution base = solve_wtv(data, realize_weight(scalar_weight(hi), g), solver_options(c));
    const double contrast_loss = value_range(f0) - value_range(base.u);
    report["scalar_baseline"] = {{"alpha", hi}, {"contrast_loss", contrast_loss}};
    if (wants(c, "csv")) write_signal_csv(out_file(c, "u.csv"), sol.u);
    if (wants(c, "json")) write_json(out_file(c, "recover.json"), report);
    std::cout << "recovery sup-error " << format_double(err) << ", scalar contrast loss "
              << format_double(contrast_loss) << "\n";
    return sol.converged ? kExitOk : kExitNoConverge;
  }

  if (model == "wfid") {
    std::vector<int> levels;
    std::stringstream in(levels_arg.empty() ? std::string("4,8,16,32") : levels_arg);
    std::string tok;
    while (std::getline(in, tok, ',')) levels.push_back(std::stoi(tok));
    auto f0_fn = [&](double x) {
      const int j = std::clamp(static_cast<int>((x - g.a) / g.h), 0, g.n - 1);
      return f0.values[j];
    };
    const auto pts = pc_limit_recovery(f0_fn, noise, breaks, levels, g, solver_options(c));
    json rows = json::array();
    std::ofstream csv(out_file(c, "levels.csv"));
    csv << "level,sup_error\n";
    bool conv = true;
    for (const auto& p : pts) {
      rows.push_back({{"level", p.level}, {"sup_error", p.sup_error}});
      csv << p.level << ',' << format_double(p.sup_error) << '\n';
      conv = conv && p.solution.converged;
      std::cout << "level " << p.level << ": sup-error " << format_double(p.sup_error) << "\n";
    }
    report["levels"] = rows;
    if (wants(c, "json")) write_json(out_file(c, "recover.json"), report);
    return conv ? kExitOk : kExitNoConverge;
  }

  throw std::invalid_argument("recover-pc: model must be wtv or wfid");
}

// ---------------------------------------------------------------------------

int cmd_analytic(const std::string& family, double L, double lambda, double mu, double cc, double s,
                 double alpha, const std::string& points_arg, double bound, double margin,
                 const CommonOpts& c) {
  if (family == "affine-abs") {
    const Grid g = grid_override(c).value_or(make_grid(-L, L, 4096));
    const auto [u, k] = affine_abs_solution(L, lambda, mu, cc, g);
    write_signal_csv(out_file(c, "u.csv"), u);
    const char* names[3] = {"two_plateaus_with_jump", "pure_step", "zero"};
    write_json(out_file(c, "case.json"), json{{"family", family},
                                              {"regime", names[static_cast<int>(k.regime)]},
                                              {"x_mu_c", k.x_mu_c},
                                              {"jump_size", k.jump_size},
                                              {"plateau_value", k.plateau_value}});
    return kExitOk;
  }
  if (family == "step") {
    const Grid g = grid_override(c).value_or(make_grid(-L, L, 4096));
    const Signal u = scalar_tv_step_solution(L, s, alpha, g);
    write_signal_csv(out_file(c, "u.csv"), u);
    write_json(out_file(c, "case.json"),
               json{{"family", family}, {"height", std::max(s - alpha / L, 0.0)}});
    return kExitOk;
  }
  if (family == "pc-weight") {
    std::vector<double> pts;
    std::stringstream in(points_arg);
    std::string tok;
    while (std::getline(in, tok, ',')) pts.push_back(parse_double(tok, "points"));
    const WeightSpec spec = pc_exact_weight(pts, bound, margin);
    write_json(out_file(c, "weight.json"), to_json(spec));
    return kExitOk;
  }
  throw std::invalid_argument("analytic: family must be affine-abs, step or pc-weight");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wtv1d: spatially adaptive total-variation denoising on 1d grids"};
  app.require_subcommand(1);

  CommonOpts c;

  auto* solve_cmd = app.add_subcommand("solve", "solve a weighted problem from csv data");
  std::string mode, f_path, alpha_arg, w_path, u_path;
  solve_cmd->add_option("mode", mode, "wtv or wfid")->required();
  solve_cmd->add_option("--f", f_path, "data csv")->required();
  solve_cmd->add_option("--alpha", alpha_arg, "regularizer weight (json or shorthand)");
  solve_cmd->add_option("--w", w_path, "fidelity weight csv");
  add_common(solve_cmd, c);

  auto* verify_cmd = app.add_subcommand("verify", "check the certificate of a candidate solution");
  verify_cmd->add_option("mode", mode, "wtv or wfid")->required();
  verify_cmd->add_option("--f", f_path, "data csv")->required();
  verify_cmd->add_option("--u", u_path, "candidate csv")->required();
  verify_cmd->add_option("--alpha", alpha_arg, "regularizer weight");
  verify_cmd->add_option("--w", w_path, "fidelity weight csv");
  add_common(verify_cmd, c);

  auto* prop_cmd = app.add_subcommand("properties", "run the structural property suites");
  std::string fixtures_arg, alpha1_arg;
  int random_count = 0, prop_n = 0;
  bool semigroup = false, vanishing = false;
  double alpha2 = 0.2;
  prop_cmd->add_option("--fixtures", fixtures_arg, "named fixture set (table1)");
  prop_cmd->add_option("--random", random_count, "randomized campaign size");
  prop_cmd->add_flag("--semigroup", semigroup, "composition checks");
  prop_cmd->add_flag("--vanishing", vanishing, "vanishing-weight floors");
  prop_cmd->add_option("--alpha1", alpha1_arg, "first weight for --semigroup");
  prop_cmd->add_option("--alpha2", alpha2, "scalar second weight for --semigroup");
  prop_cmd->add_option("--n", prop_n, "grid size");
  add_common(prop_cmd, c);

  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep over the (mu, c) plane");
  std::string mu_range = "0.05:2:16", c_range = "0.05:1.5:16";
  double sweep_lambda = 2.0, sweep_L = 1.0;
  int sweep_n = 1024;
  sweep_cmd->add_option("--mu", mu_range, "mu range lo:hi:steps");
  sweep_cmd->add_option("--c", c_range, "c range lo:hi:steps");
  sweep_cmd->add_option("--lambda", sweep_lambda, "data slope");
  sweep_cmd->add_option("--L", sweep_L, "half width of the domain");
  sweep_cmd->add_option("--n", sweep_n, "grid size");
  add_common(sweep_cmd, c);

  auto* rec_cmd = app.add_subcommand("recover-pc", "piecewise-constant recovery experiments");
  std::string rec_model = "wtv", f0_arg, noise_arg, levels_arg;
  double rec_margin = 1.2;
  int rec_n = 1024;
  rec_cmd->add_option("--model", rec_model, "wtv or wfid");
  rec_cmd->add_option("--f0", f0_arg, "target json {breaks, values}")->required();
  rec_cmd->add_option("--noise", noise_arg, "noise json");
  rec_cmd->add_option("--levels", levels_arg, "comma list of levels (wfid)");
  rec_cmd->add_option("--margin", rec_margin, "tent slope margin (wtv)");
  rec_cmd->add_option("--n", rec_n, "grid size");
  add_common(rec_cmd, c);

  auto* ana_cmd = app.add_subcommand("analytic", "evaluate the closed-form solutions");
  std::string family = "affine-abs", points_arg = "-1,0,1";
  double ana_L = 1.0, ana_lambda = 2.0, ana_mu = 0.2, ana_c = 0.3, ana_s = 1.0, ana_alpha = 0.5;
  double ana_bound = 1.0, ana_margin = 1.2;
  ana_cmd->add_option("--family", family, "affine-abs, step or pc-weight");
  ana_cmd->add_option("--L", ana_L, "half width");
  ana_cmd->add_option("--lambda", ana_lambda, "data slope");
  ana_cmd->add_option("--mu", ana_mu, "weight slope");
  ana_cmd->add_option("--c", ana_c, "weight offset");
  ana_cmd->add_option("--s", ana_s, "step height");
  ana_cmd->add_option("--alpha", ana_alpha, "scalar weight");
  ana_cmd->add_option("--points", points_arg, "interval boundaries (pc-weight)");
  ana_cmd->add_option("--bound", ana_bound, "data bound (pc-weight)");
  ana_cmd->add_option("--margin", ana_margin, "slope margin (pc-weight)");
  add_common(ana_cmd, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(mode, f_path, alpha_arg, w_path, c);
    if (verify_cmd->parsed()) return cmd_verify(mode, f_path, u_path, alpha_arg, w_path, c);
    if (prop_cmd->parsed()) {
      if (!fixtures_arg.empty() && fixtures_arg != "table1")
        throw std::invalid_argument("unknown fixture set '" + fixtures_arg + "'");
      return cmd_properties(!fixtures_arg.empty(), random_count, semigroup, vanishing, alpha1_arg,
                            alpha2, prop_n, c);
    }
    if (sweep_cmd->parsed()) return cmd_sweep(mu_range, c_range, sweep_lambda, sweep_L, sweep_n, c);
    if (rec_cmd->parsed())
      return cmd_recover_pc(rec_model, f0_arg, noise_arg, levels_arg, rec_margin, rec_n, c);
    if (ana_cmd->parsed())
      return cmd_analytic(family, ana_L, ana_lambda, ana_mu, ana_c, ana_s, ana_alpha, points_arg,
                          ana_bound, ana_margin, c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
