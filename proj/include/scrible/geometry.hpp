#ifndef SCRIBLE_GEOMETRY_HPP
#define SCRIBLE_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "scrible/error.hpp"
#include "scrible/random.hpp"

namespace scrible {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point is interior when its gauge from the center is at most 1 - kInteriorMargin.
inline constexpr double kInteriorMargin = 1e-9;

struct Ball {
  double radius;
};

struct Box {
  Vector halfwidths;
};

/// Centrally symmetric convex body: Euclidean ball or axis-aligned box, both
/// centered at the origin.
class Domain {
 public:
  /// Ball of the given radius. The radius must be >= 1 so that K contains the unit ball.
  static Domain ball(int dim, double radius) {
    if (dim < 1) throw ConfigError("Domain::ball: dimension must be >= 1");
    if (!(radius >= 1.0) || !std::isfinite(radius))
      throw ConfigError("Domain::ball: radius must be finite and >= 1, got " + std::to_string(radius));
    return Domain(dim, Ball{radius});
  }

  static Domain box(const Vector& halfwidths) {
    if (halfwidths.size() < 1) throw ConfigError("Domain::box: dimension must be >= 1");
    for (Eigen::Index i = 0; i < halfwidths.size(); ++i) {
      if (!(halfwidths[i] >= 1.0) || !std::isfinite(halfwidths[i]))
        throw ConfigError("Domain::box: every halfwidth must be finite and >= 1");
    }
    return Domain(static_cast<int>(halfwidths.size()), Box{halfwidths});
  }

  static Domain cube(int dim, double halfwidth) {
    if (dim < 1) throw ConfigError("Domain::cube: dimension must be >= 1");
    return box(Vector::Constant(dim, halfwidth));
  }

  int dim() const { return dim_; }
  bool is_ball() const { return std::holds_alternative<Ball>(kind_); }
  bool is_box() const { return std::holds_alternative<Box>(kind_); }
  const std::variant<Ball, Box>& kind() const { return kind_; }

  double radius() const {
    if (!is_ball()) throw ConfigError("Domain::radius: not a ball");
    return std::get<Ball>(kind_).radius;
  }

  const Vector& halfwidths() const {
    if (!is_box()) throw ConfigError("Domain::halfwidths: not a box");
    return std::get<Box>(kind_).halfwidths;
  }

  double diameter() const {
    if (is_ball()) return 2.0 * radius();
    return 2.0 * halfwidths().norm();
  }

  /// Minkowski gauge with respect to the center: inf{s > 0 : x / s in K}.
  double gauge(const Vector& x) const {
    check_dim(x);
    if (is_ball()) return x.norm() / radius();
    return (x.array().abs() / halfwidths().array()).maxCoeff();
  }

  bool contains(const Vector& x, double tol = 0.0) const { return gauge(x) <= 1.0 + tol; }

  bool is_interior(const Vector& x) const { return gauge(x) <= 1.0 - kInteriorMargin; }

  /// The body scaled by `factor` about the center. Not validated against the
  /// unit-ball requirement; used for K_delta.
  Domain scaled(double factor) const {
    if (is_ball()) return Domain(dim_, Ball{factor * radius()});
    return Domain(dim_, Box{factor * halfwidths()});
  }

  /// sup{s >= 0 : x + s v in K} for x in K and v != 0.
  double max_step(const Vector& x, const Vector& v) const {
    check_dim(x);
    check_dim(v);
    if (is_ball()) {
      const double r = radius();
      const double a = v.squaredNorm();
      if (a == 0.0) return std::numeric_limits<double>::infinity();
      const double b = 2.0 * x.dot(v);
      const double c = std::min(0.0, x.squaredNorm() - r * r);
      const double disc = std::sqrt(b * b - 4.0 * a * c);
      // Stable root selection for the positive solution of a s^2 + b s + c = 0.
      return b >= 0.0 ? (-2.0 * c) / (b + disc) : (-b + disc) / (2.0 * a);
    }
    const Vector& h = halfwidths();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim_; ++i) {
      if (v[i] > 0.0) best = std::min(best, (h[i] - x[i]) / v[i]);
      else if (v[i] < 0.0) best = std::min(best, (-h[i] - x[i]) / v[i]);
    }
    return std::max(best, 0.0);
  }

  void check_dim(const Vector& x) const {
    if (x.size() != dim_)
      throw ConfigError("dimension mismatch: expected " + std::to_string(dim_) + ", got " +
                        std::to_string(x.size()));
  }

  friend bool operator==(const Domain& a, const Domain& b) {
    if (a.dim_ != b.dim_ || a.is_ball() != b.is_ball()) return false;
    if (a.is_ball()) return a.radius() == b.radius();
    return a.halfwidths() == b.halfwidths();
  }

 private:
  Domain(int dim, std::variant<Ball, Box> kind) : dim_(dim), kind_(std::move(kind)) {}

  int dim_;
  std::variant<Ball, Box> kind_;
};

/// K_delta = {x : x / (1 - delta) in K}.
class ShrunkDomain {
 public:
  ShrunkDomain(Domain base, double delta) : base_(std::move(base)), delta_(delta), scaled_(base_.scaled(1.0 - delta)) {}

  const Domain& base() const { return base_; }
  double delta() const { return delta_; }
  /// K_delta as a plain (scaled) domain.
  const Domain& as_domain() const { return scaled_; }

  bool contains(const Vector& x, double tol = 0.0) const { return base_.contains(x / (1.0 - delta_), tol); }
  double gauge(const Vector& x) const { return base_.gauge(x) / (1.0 - delta_); }

 private:
  Domain base_;
  double delta_;
  Domain scaled_;
};

inline constexpr double kMaxShrink = 2.0 / 3.0;

inline ShrunkDomain shrink(const Domain& domain, double delta) {
  if (!(delta > 0.0 && delta <= kMaxShrink))
    throw ConfigError("shrink: delta must lie in (0, 2/3], got " + std::to_string(delta));
  return ShrunkDomain(domain, delta);
}

/// pi_x(z) = inf{t >= 0 : x + (z - x) / t in K}, clamped to [0, 1).
inline double minkowski_gauge(const Domain& domain, const Vector& x, const Vector& z) {
  if (!domain.is_interior(x)) throw DomainError("minkowski_gauge: x is not interior");
  if (!domain.contains(z, 1e-12)) throw DomainError("minkowski_gauge: z lies outside K");
  const Vector v = z - x;
  if (v.isZero(0.0)) return 0.0;
  const double s = domain.max_step(x, v);
  const double pi = 1.0 / s;
  return std::clamp(pi, 0.0, std::nextafter(1.0, 0.0));
}

/// Uniform draw from K (rejection-free for both kinds).
inline Vector sample_uniform_in(const Domain& domain, RngStream& rng) {
  const int d = domain.dim();
  if (domain.is_ball()) {
    const Vector u = sample_unit_sphere(rng, d);
    return domain.radius() * std::pow(rng.uniform(), 1.0 / d) * u;
  }
  Vector x(d);
  const Vector& h = domain.halfwidths();
  for (int i = 0; i < d; ++i) x[i] = rng.uniform(-h[i], h[i]);
  return x;
}

}  // namespace scrible

#endif  // SCRIBLE_GEOMETRY_HPP
