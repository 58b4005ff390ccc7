#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support/brute.hpp"
#include "wtv1d/analysis.hpp"
#include "wtv1d/analytic.hpp"
#include "wtv1d/bv.hpp"
#include "wtv1d/corpus.hpp"
#include "wtv1d/solve.hpp"

using namespace wtv1d;

namespace {

constexpr double kPi = 3.14159265358979323846;

Signal rand_signal(std::mt19937_64& rng, const Grid& g, int pieces = 6) {
  return random_piecewise_signal(rng, g, pieces);
}

}  // namespace

TEST_CASE("total flattening under a large scalar weight", "[solver]") {
  const Grid g = make_grid(-1.0, 1.0, 64);
  std::mt19937_64 rng(23);
  const Signal f = rand_signal(rng, g);
  const double m = mean_value(f);
  double dev = 0.0;
  for (double v : f.values) dev = std::max(dev, std::abs(v - m));
  const double alpha0 = 1.1 * g.length() * dev;

  const Solution sol = solve_wtv(f, realize_weight(scalar_weight(alpha0), g));
  REQUIRE(sol.converged);
  for (double v : sol.u.values) CHECK(v == Catch::Approx(m).margin(1e-10));

  // the dual variable is the running sum of h (f - mean)
  double acc = 0.0;
  for (int j = 0; j < g.n; ++j) {
    acc += g.h * (f.values[j] - m);
    CHECK(sol.v[j + 1] == Catch::Approx(acc).margin(1e-9));
  }
}

TEST_CASE("step data with scalar weight matches the hand certificate", "[solver]") {
  const Grid g = make_grid(-1.0, 1.0, 256);
  const Signal f = sample(g, [](double x) { return static_cast<double>(sgn(x)); });

  const Solution sol = solve_wtv(f, realize_weight(scalar_weight(0.5), g));
  REQUIRE(sol.converged);
  const Signal oracle = scalar_tv_step_solution(1.0, 1.0, 0.5, g);
  CHECK(linf_distance(sol.u, oracle) < 1e-9);

  // flattening when alpha >= s L
  const Solution flat = solve_wtv(f, realize_weight(scalar_weight(1.0), g));
  for (double v : flat.u.values) CHECK(std::abs(v) < 1e-9);

  // no regularization limit
  const Solution tight = solve_wtv(f, realize_weight(scalar_weight(1e-8), g));
  CHECK(linf_distance(tight.u, f) < 1e-6);
}

TEST_CASE("solver matches the brute-force oracle on small grids", "[solver]") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = uniform_int(rng, 4, 8);
    const Grid g = make_grid(-1.0, 1.0, n);
    std::vector<double> f(n), beta(n - 1);
    for (double& x : f) x = uniform(rng, -1.0, 1.0);
    for (double& x : beta) x = u01(rng) < 0.2 ? 0.0 : uniform(rng, 0.0, 0.8);
    const std::vector<double> w(n, 1.0);

    const auto exact = testing::brute_force_minimizer(g, f, w, beta);
    const Solution sol = solve_wtv(make_signal(g, f),
                                   realize_weight(sampled_weight(beta), g));
    REQUIRE(sol.converged);
    CHECK(linf_distance(sol.u.values, exact) < 1e-8);
  }
}

TEST_CASE("weak duality and the exact linkage", "[solver]") {
  std::mt19937_64 rng(7);
  const Grid g = make_grid(-1.0, 1.0, 48);
  const Signal f = rand_signal(rng, g);
  const WeightField alpha = realize_weight(abs_weight(0.3, 0.2, 0.1), g);

  CHECK(dual_objective(f, alpha, std::vector<double>(g.n + 1, 0.0)) == 0.0);

  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(g.n + 1, 0.0);
    for (int i = 0; i < g.num_edges(); ++i)
      v[i + 1] = uniform(rng, -alpha.edge_values[i], alpha.edge_values[i]);
    const Signal u = rand_signal(rng, g);
    CHECK(dual_objective(f, alpha, v) <= objective_wtv(f, alpha, u) + 1e-10);
  }

  std::vector<double> bad(g.n + 1, 0.0);
  bad[1] = alpha.edge_values[0] + 1.0;
  CHECK_THROWS_AS(dual_objective(f, alpha, bad), std::invalid_argument);

  const Solution sol = solve_wtv(f, alpha);
  REQUIRE(sol.converged);
  CHECK(sol.gap <= 1e-10);
  // u = f - (1/h) Bv holds to rounding
  for (int j = 0; j < g.n; ++j) {
    const double linked = f.values[j] - (sol.v[j + 1] - sol.v[j]) / g.h;
    CHECK(sol.u.values[j] == Catch::Approx(linked).margin(1e-11));
  }
  CHECK(sol.v.front() == 0.0);
  CHECK(sol.v.back() == 0.0);
  // strong duality at the returned pair
  CHECK(dual_objective(f, alpha, sol.v) <=
        objective_wtv(f, alpha, sol.u) + 1e-12 * (1.0 + objective_wtv(f, alpha, sol.u)));
}

TEST_CASE("objective_wtv special values", "[solver]") {
  const Grid g = make_grid(-1.0, 1.0, 32);
  std::mt19937_64 rng(31);
  const Signal f = rand_signal(rng, g);
  const WeightField alpha = realize_weight(scalar_weight(0.4), g);

  CHECK(objective_wtv(f, alpha, f) == Catch::Approx(weighted_tv(f, alpha)).margin(1e-14));

  const Signal zero = sample(g, [](double) { return 0.0; });
  CHECK(objective_wtv(zero, alpha, zero) == 0.0);

  const double m = mean_value(f);
  const Signal cm = sample(g, [&](double) { return m; });
  double fid = 0.0;
  for (double v : f.values) fid += (v - m) * (v - m);
  CHECK(objective_wtv(f, alpha, cm) == Catch::Approx(0.5 * g.h * fid).margin(1e-13));
}

TEST_CASE("solver rejects bad input", "[solver]") {
  const Grid g = make_grid(-1.0, 1.0, 8);
  Signal f = sample(g, [](double x) { return x; });
  const WeightField alpha = realize_weight(scalar_weight(0.1), g);
  f.values[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve_wtv(f, alpha), std::invalid_argument);

  const Grid other = make_grid(-1.0, 1.0, 16);
  CHECK_THROWS_AS(solve_wtv(sample(other, [](double x) { return x; }), alpha), std::invalid_argument);

  CHECK_THROWS_AS(solve_wtv(sample(g, [](double x) { return x; }), alpha, SolverOptions{0, 1e-10}),
                  std::invalid_argument);
}

TEST_CASE("non-convergence is flagged, best iterate returned", "[solver]") {
  const Grid g = make_grid(-1.0, 1.0, 512);
  const Signal f = sample(g, [](double x) { return sgn(x) * 1.0 + 0.3 * std::sin(20.0 * x); });
  SolverOptions opts;
  opts.max_iterations = 3;
  opts.polish = false;
  opts.gap_tolerance = 1e-14;
  const Solution sol = solve_wtv(f, realize_weight(scalar_weight(0.2), g), opts);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iterations <= 3);
  CHECK(std::isfinite(sol.gap));
}

TEST_CASE("maximum principle and boundary plateaus", "[solver]") {
  std::mt19937_64 rng(77);
  const Grid g = make_grid(-1.0, 1.0, 128);
  for (int trial = 0; trial < 20; ++trial) {
    const Signal f = rand_signal(rng, g);
    const WeightField alpha = realize_weight(random_weight_spec(rng, g, value_range(f), false), g);
    const Solution sol = solve_wtv(f, alpha);
    REQUIRE(sol.converged);
    CHECK(maximum_principle_check(f, sol.u, 1e-8).holds);
  }

  // weight bounded below by c > 2 h max|f| keeps the first and last cells flat
  const Signal f = rand_signal(rng, g);
  const double c = 4.0 * g.h * max_abs(f.values) + 0.01;
  const Solution sol = solve_wtv(f, realize_weight(scalar_weight(c), g));
  REQUIRE(sol.converged);
  CHECK(std::abs(sol.u.values[0] - sol.u.values[1]) < 1e-9);
  CHECK(std::abs(sol.u.values[g.n - 1] - sol.u.values[g.n - 2]) < 1e-9);
}

TEST_CASE("oscillation structure of solutions", "[solver]") {
  std::mt19937_64 rng(12345);
  const Grid g = make_grid(-1.0, 1.0, 96);
  for (int trial = 0; trial < 25; ++trial) {
    const Signal f = rand_signal(rng, g);
    const WeightField alpha = realize_weight(random_weight_spec(rng, g, value_range(f), true), g);
    const Solution sol = solve_wtv(f, alpha);
    REQUIRE(sol.converged);
    const double dthr = std::max(default_jump_threshold(sol.u),
                                 gap_noise_floor(g, sol.gap, objective_wtv(f, alpha, sol.u)));
    const RunProfile prof = monotone_run_profile(f, sol.u, 10.0 * dthr, dthr);
    CHECK(prof.all_ok);
  }
}

TEST_CASE("tv bound on random instances", "[solver]") {
  std::mt19937_64 rng(999);
  const Grid g = make_grid(-1.0, 1.0, 96);
  for (int trial = 0; trial < 50; ++trial) {
    const Signal f = rand_signal(rng, g);
    const WeightField alpha = realize_weight(random_weight_spec(rng, g, value_range(f), true), g);
    const Solution sol = solve_wtv(f, alpha);
    REQUIRE(sol.converged);
    const double scale = 1.0 + total_variation(f);
    CHECK(tv_bound_check(f, sol.u, 1e-8 * scale).holds);
  }
}

TEST_CASE("partial semigroup with scalar second weight", "[solver]") {
  const Grid g = make_grid(-1.0, 1.0, 512);
  const Signal f = sample(g, [](double x) { return 2.0 * x; });

  // scalar + scalar: the classical semigroup identity
  const SemigroupResult ss =
      semigroup_compose(f, realize_weight(scalar_weight(0.15), g), 0.2);
  REQUIRE(ss.all_converged());
  CHECK(ss.distance < 1e-7);

  // V-shaped + scalar
  const SemigroupResult vs = semigroup_compose(f, realize_weight(abs_weight(0.2, 0.3, 0.0), g), 0.2);
  REQUIRE(vs.all_converged());
  CHECK(vs.distance < 1e-7);

  // reversed order: scalar first, then a V-shaped weight whose kink falls in
  // a region the scalar solve has flattened away from the data
  const Signal step = sample(g, [](double x) { return static_cast<double>(sgn(x)); });
  const WeightField vee = realize_weight(abs_weight(0.5, 0.05, 0.3), g);
  const SemigroupResult fwd = semigroup_compose(step, vee, 0.3);
  REQUIRE(fwd.all_converged());
  CHECK(fwd.distance < 1e-7);
  const Solution u_scalar = solve_wtv(step, realize_weight(scalar_weight(0.3), g));
  const Solution reversed = solve_wtv(u_scalar.u, vee);
  CHECK(linf_distance(fwd.one_shot.u, reversed.u) > 0.1);
}

TEST_CASE("vanishing weight floors", "[solver]") {
  const Grid g = make_grid(-1.0, 1.0, 256);
  std::mt19937_64 rng(4242);

  // weight already bounded below: the floor is irrelevant
  const Signal f = rand_signal(rng, g);
  const WeightField bounded = realize_weight(abs_weight(0.2, 0.3, 0.0), g);
  const auto res = vanishing_weight_limit(f, bounded, {1e-2, 1e-3, 1e-4});
  for (const auto& e : res.entries) REQUIRE(e.solution.converged);
  for (double d : res.entries.front().solution.u.values) CHECK(std::isfinite(d));
  CHECK(res.entries.front().distance_to_final < 0.2);

  // objectives decrease as the floor decreases
  for (std::size_t k = 0; k + 1 < res.objectives.size(); ++k)
    CHECK(res.objectives[k + 1] <= res.objectives[k] + 1e-12);

  // tent weights with floors: the solutions approach exact recovery
  const Signal f0 = sample(g, [](double x) { return static_cast<double>(sgn(x)); });
  const Signal noisy = sample(g, [](double x) {
    return static_cast<double>(sgn(x)) + 0.3 * std::sin(2.0 * kPi * x);
  });
  const WeightSpec tent = pc_exact_weight({-1.0, 0.0, 1.0}, 1.3, 1.2);
  const auto rec = vanishing_weight_limit(noisy, realize_weight(tent, g), {1e-1, 1e-2, 1e-3, 1e-4});
  std::vector<double> err;
  for (const auto& e : rec.entries) {
    REQUIRE(e.solution.converged);
    err.push_back(linf_distance(e.solution.u, f0));
  }
  CHECK(err.back() < 0.02);
  CHECK(err.back() < err.front());

  CHECK_THROWS_AS(vanishing_weight_limit(f, bounded, {1e-2, 1e-2}), std::invalid_argument);
  CHECK_THROWS_AS(vanishing_weight_limit(f, bounded, {}), std::invalid_argument);
}
