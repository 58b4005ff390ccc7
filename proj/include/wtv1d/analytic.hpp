#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wtv1d/grid.hpp"
#include "wtv1d/weights.hpp"

namespace wtv1d {

// Closed-form minimizers for affine data f(x) = lambda x on (-L, L) under
// the V-shaped weight mu |x| + c. Three regimes partition the (mu, c)
// quadrant:
//   mu L + c < lambda L^2 / 2            ramps with plateaus and a jump of 2 mu at 0
//   mu L + c >= lambda L^2 / 2, c < ...  a pure step of height 2 (lambda L / 2 - c / L)
//   c >= lambda L^2 / 2                  identically zero
enum class AffineAbsRegime { two_plateaus_with_jump, pure_step, zero };

struct AffineAbsCase {
  double L = 0.0, lambda = 0.0, mu = 0.0, c = 0.0;
  AffineAbsRegime regime = AffineAbsRegime::zero;
  double x_mu_c = 0.0;         // ramp/plateau junction (regime 1)
  double step = 0.0;           // plateau magnitude of the pure step (regime 2)
  double jump_size = 0.0;      // jump of u at the origin
  double plateau_value = 0.0;  // value of u on the outer plateau (x > 0)

  double evaluate(double x) const {
    switch (regime) {
      case AffineAbsRegime::two_plateaus_with_jump: {
        if (x == 0.0) return 0.0;
        const double ax = std::abs(x);
        const double body = (ax < x_mu_c) ? lambda * ax + mu : plateau_value;
        return sgn(x) * body;
      }
      case AffineAbsRegime::pure_step:
        return sgn(x) * step;
      case AffineAbsRegime::zero:
        return 0.0;
    }
    return 0.0;
  }
};

inline AffineAbsCase classify_affine_abs(double L, double lambda, double mu, double c) {
  if (!(L > 0.0) || !(lambda > 0.0) || !(mu > 0.0) || !(c > 0.0))
    throw std::invalid_argument("affine_abs_solution: parameters must be > 0");
  AffineAbsCase k;
  k.L = L;
  k.lambda = lambda;
  k.mu = mu;
  k.c = c;
  const double half = 0.5 * lambda * L * L;
  if (mu * L + c < half) {
    k.regime = AffineAbsRegime::two_plateaus_with_jump;
    k.x_mu_c = L - std::sqrt(2.0 * lambda * mu * L + 2.0 * lambda * c) / lambda;
    k.jump_size = 2.0 * mu;
    k.plateau_value = lambda * k.x_mu_c + mu;
  } else if (c < half) {
    k.regime = AffineAbsRegime::pure_step;
    k.step = 0.5 * lambda * L - c / L;
    k.jump_size = 2.0 * k.step;
    k.plateau_value = k.step;
  } else {
    k.regime = AffineAbsRegime::zero;
  }
  return k;
}

inline std::pair<Signal, AffineAbsCase> affine_abs_solution(double L, double lambda, double mu, double c,
                                                            const Grid& grid) {
  const double tol = 1e-9 * L;
  if (std::abs(grid.a + L) > tol || std::abs(grid.b - L) > tol)
    throw std::invalid_argument("affine_abs_solution: grid must span (-L, L)");
  const AffineAbsCase k = classify_affine_abs(L, lambda, mu, c);
  return {sample(grid, [&](double x) { return k.evaluate(x); }), k};
}

// Derived oracle for step data f = s sign(x) under a scalar weight:
// u = sign(x) max(s - alpha / L, 0). Certified by the dual variable that is
// piecewise linear on each half with v(0) = -alpha (when the step survives).
inline Signal scalar_tv_step_solution(double L, double s, double alpha, const Grid& grid) {
  if (!(L > 0.0) || !(s > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("scalar_tv_step_solution: parameters must be > 0");
  const double tol = 1e-9 * L;
  if (std::abs(grid.a + L) > tol || std::abs(grid.b - L) > tol)
    throw std::invalid_argument("scalar_tv_step_solution: grid must span (-L, L)");
  const double height = std::max(s - alpha / L, 0.0);
  return sample(grid, [&](double x) { return sgn(x) * height; });
}

// Tent weight that recovers a piecewise constant function with jumps at the
// interior interval boundaries: zero at every boundary, slopes steep enough
// to flatten everything else.
inline WeightSpec pc_exact_weight(const std::vector<double>& interval_points, double f_bound,
                                  double slope_margin) {
  if (interval_points.size() < 2) throw std::invalid_argument("pc_exact_weight: need at least one interval");
  for (std::size_t k = 1; k < interval_points.size(); ++k)
    if (!(interval_points[k] > interval_points[k - 1]))
      throw std::invalid_argument("pc_exact_weight: degenerate interval");
  if (!(f_bound > 0.0)) throw std::invalid_argument("pc_exact_weight: need f_bound > 0");
  if (!(slope_margin > 1.0)) throw std::invalid_argument("pc_exact_weight: need slope_margin > 1");
  const double slope = slope_margin * 2.0 * f_bound;
  return tent_weight(interval_points,
                     std::vector<double>(interval_points.size() - 1, slope));
}

}  // namespace wtv1d
