#ifndef SCRIBLE_FTRL_HPP
#define SCRIBLE_FTRL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "scrible/barrier.hpp"
#include "scrible/error.hpp"
#include "scrible/geometry.hpp"

namespace scrible {

struct FtrlSolution {
  Vector x;
  /// Scaled first-order residual; zero for coordinates pinned at the K_delta boundary.
  double residual = 0.0;
  int iterations = 0;
  /// True when the K_delta constraint is active.
  bool constrained = false;
};

namespace detail {

struct ScalarSolution {
  double u;
  double residual;
  int iterations;
  bool clamped;
};

// Minimizes k*u - log(a^2 - u^2) over u in [-m, m], 0 < m < a. The derivative
// k + 2u / (a^2 - u^2) is strictly increasing, so the minimizer is either the
// unique root or the endpoint on the side the derivative points away from.
inline ScalarSolution solve_log_barrier_1d(double k, double a, double m, double tol, int max_iter) {
  auto dphi = [&](double u) { return k + 2.0 * u / ((a - u) * (a + u)); };
  auto d2phi = [&](double u) {
    const double g = (a - u) * (a + u);
    return 2.0 * (a * a + u * u) / (g * g);
  };
  if (dphi(m) <= 0.0) return {m, 0.0, 0, true};
  if (dphi(-m) >= 0.0) return {-m, 0.0, 0, true};

  const double scale = std::max(1.0, std::abs(k));
  double lo = -m;
  double hi = m;
  double u = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const double f = dphi(u);
    if (f < 0.0) lo = u;
    else hi = u;
    const double step = f / d2phi(u);
    if (std::abs(f) <= tol * scale && std::abs(step) <= 1e-13 * a) return {u, std::abs(f) / scale, it, false};
    double next = u - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * a) {
      const double r = std::abs(dphi(next)) / scale;
      return {next, r, it, false};
    }
    u = next;
  }
  throw SolverError("FTRL 1-D Newton did not converge within " + std::to_string(max_iter) + " iterations",
                    std::abs(dphi(u)) / scale);
}

// Upper limit of the feasible radius (ball) or coordinate (box) for K_delta.
// With delta = 0 the limit stays inside K by the interior margin.
inline double feasible_fraction(double delta) { return delta > 0.0 ? 1.0 - delta : 1.0 - 2.0 * kInteriorMargin; }

}  // namespace detail

/// argmin over K_delta of <linear, x> + R(x), with `linear` = eta * sum of estimators.
/// delta = 0 optimizes over K itself. Exploits the structure of the Ball/Box barriers:
/// the ball problem is radial along -linear and the box problem separates per coordinate.
inline FtrlSolution solve_ftrl(const Barrier& barrier, const Vector& linear, double delta, double tol = 1e-10,
                               int max_iter = 200) {
  const Domain& K = barrier.domain();
  K.check_dim(linear);
  if (!(delta >= 0.0 && delta <= kMaxShrink)) throw ConfigError("solve_ftrl: delta must lie in [0, 2/3]");
  const double frac = detail::feasible_fraction(delta);
  FtrlSolution sol;
  sol.x = Vector::Zero(K.dim());

  if (K.is_ball()) {
    const double c = linear.norm();
    if (c == 0.0) return sol;
    const double r = K.radius();
    const auto s = detail::solve_log_barrier_1d(-c, r, frac * r, tol, max_iter);
    sol.x = (-s.u / c) * linear;
    sol.residual = s.residual;
    sol.iterations = s.iterations;
    sol.constrained = s.clamped;
    return sol;
  }

  const Vector& h = K.halfwidths();
  for (int i = 0; i < K.dim(); ++i) {
    const auto s = detail::solve_log_barrier_1d(linear[i], h[i], frac * h[i], tol, max_iter);
    sol.x[i] = s.u;
    sol.residual = std::max(sol.residual, s.residual);
    sol.iterations = std::max(sol.iterations, s.iterations);
    sol.constrained = sol.constrained || s.clamped;
  }
  return sol;
}

/// Generic damped Newton for <linear, x> + R(x), started at the center, with a
/// fraction-to-boundary rule keeping iterates at gauge <= 1 - kInteriorMargin of
/// K_delta. Only valid when the minimizer is interior to K_delta; if the boundary
/// cap keeps binding the solve fails with SolverError.
inline FtrlSolution solve_ftrl_damped_newton(const Barrier& barrier, const Vector& linear, double delta,
                                             double tol = 1e-10, int max_iter = 200) {
  const Domain& K = barrier.domain();
  K.check_dim(linear);
  if (!(delta >= 0.0 && delta <= kMaxShrink)) throw ConfigError("solve_ftrl_damped_newton: delta must lie in [0, 2/3]");
  const Domain limit = K.scaled((1.0 - delta) * (1.0 - kInteriorMargin));

  FtrlSolution sol;
  sol.x = Vector::Zero(K.dim());
  double decrement = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector grad = linear + barrier.gradient(sol.x);
    Eigen::LLT<Matrix> llt(barrier.hessian(sol.x));
    if (llt.info() != Eigen::Success) throw NumericalError("solve_ftrl_damped_newton: Hessian factorization failed");
    const Vector dir = -llt.solve(grad);
    decrement = std::sqrt(std::max(0.0, -grad.dot(dir)));
    sol.iterations = it;
    if (decrement <= tol * std::max(1.0, linear.norm())) {
      sol.residual = decrement;
      return sol;
    }
    double t = decrement > 0.25 ? 1.0 / (1.0 + decrement) : 1.0;
    const double cap = limit.max_step(sol.x, dir);
    if (t >= cap) {
      t = cap;
      sol.constrained = true;
    }
    sol.x += t * dir;
  }
  throw SolverError("damped Newton FTRL did not converge", decrement);
}

}  // namespace scrible

#endif  // SCRIBLE_FTRL_HPP
