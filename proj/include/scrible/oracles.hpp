#ifndef SCRIBLE_ORACLES_HPP
#define SCRIBLE_ORACLES_HPP

// Reference computations used only for verification. They deliberately avoid
// the production code paths (no Newton steps, no barrier class, no max_step).

#include <cmath>

#include "scrible/geometry.hpp"

namespace scrible::oracle {

namespace detail {

// Root of an increasing function on [lo, hi] by plain bisection, or the
// endpoint if the sign does not change.
template <class F>
double bisect_increasing(F f, double lo, double hi, int iterations = 400) {
  if (f(hi) <= 0.0) return hi;
  if (f(lo) >= 0.0) return lo;
  for (int i = 0; i < iterations && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// argmin over K_delta of <linear, x> + R(x) for the Ball/Box barriers by bisection
/// on the 1-D stationarity conditions. delta = 0 stays 2e-9 inside K.
inline Vector ftrl_bisection(const Domain& domain, const Vector& linear, double delta) {
  const double frac = delta > 0.0 ? 1.0 - delta : 1.0 - 2e-9;
  Vector x = Vector::Zero(domain.dim());
  if (domain.is_ball()) {
    const double c = linear.norm();
    if (c == 0.0) return x;
    const double r = domain.radius();
    // d/drho [-c rho - log(1 - rho^2 / r^2)] = -c + 2 rho / (r^2 - rho^2)
    const double rho = detail::bisect_increasing([&](double p) { return -c + 2.0 * p / (r * r - p * p); }, 0.0, frac * r);
    return (-rho / c) * linear;
  }
  const Vector& h = domain.halfwidths();
  for (int i = 0; i < domain.dim(); ++i) {
    const double k = linear[i];
    const double hi = h[i];
    // d/du [k u - log(h - u) - log(h + u)] = k + 1/(h - u) - 1/(h + u)
    x[i] = detail::bisect_increasing([&](double u) { return k + 1.0 / (hi - u) - 1.0 / (hi + u); }, -frac * hi, frac * hi);
  }
  return x;
}

/// pi_x(z) via bisection on the exit parameter s of the ray x + s (z - x).
inline double gauge_bisection(const Domain& domain, const Vector& x, const Vector& z) {
  const Vector v = z - x;
  if (v.norm() == 0.0) return 0.0;
  auto inside = [&](double s) {
    const Vector p = x + s * v;
    if (domain.is_ball()) return p.norm() <= domain.radius();
    return (p.array().abs() <= domain.halfwidths().array()).all();
  };
  double lo = 0.0, hi = 1.0;
  while (inside(hi)) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (inside(mid)) lo = mid;
    else hi = mid;
  }
  return 1.0 / lo;
}

}  // namespace scrible::oracle

#endif  // SCRIBLE_ORACLES_HPP
