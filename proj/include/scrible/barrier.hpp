#ifndef SCRIBLE_BARRIER_HPP
#define SCRIBLE_BARRIER_HPP

#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "scrible/error.hpp"
#include "scrible/geometry.hpp"

namespace scrible {

/// Self-concordant barrier of a Ball or Box domain.
///
///   Ball(r):  R(x) = -log(1 - |x|^2 / r^2),                nu = 1
///   Box(h):   R(x) = -sum_i log(h_i - x_i) + log(h_i + x_i), nu = 2d
///
/// All evaluations require x strictly interior (gauge <= 1 - kInteriorMargin).
class Barrier {
 public:
  explicit Barrier(Domain domain)
      : domain_(std::move(domain)), nu_(domain_.is_ball() ? 1.0 : 2.0 * domain_.dim()) {}

  const Domain& domain() const { return domain_; }
  double nu() const { return nu_; }
  int dim() const { return domain_.dim(); }

  double value(const Vector& x) const {
    require_interior(x, "barrier_value");
    if (domain_.is_ball()) {
      const double r = domain_.radius();
      return -std::log1p(-x.squaredNorm() / (r * r));
    }
    const Vector& h = domain_.halfwidths();
    double v = 0.0;
    for (int i = 0; i < dim(); ++i) v -= std::log(h[i] - x[i]) + std::log(h[i] + x[i]);
    return v;
  }

  Vector gradient(const Vector& x) const {
    require_interior(x, "barrier_gradient");
    if (domain_.is_ball()) {
      const double r2 = domain_.radius() * domain_.radius();
      return (2.0 / (r2 - x.squaredNorm())) * x;
    }
    const Vector& h = domain_.halfwidths();
    Vector g(dim());
    for (int i = 0; i < dim(); ++i) g[i] = 1.0 / (h[i] - x[i]) - 1.0 / (h[i] + x[i]);
    return g;
  }

  Matrix hessian(const Vector& x) const {
    require_interior(x, "barrier_hessian");
    const int d = dim();
    if (domain_.is_ball()) {
      const double r2 = domain_.radius() * domain_.radius();
      const double gap = r2 - x.squaredNorm();  // r^2 (1 - s)
      Matrix H = (2.0 / gap) * Matrix::Identity(d, d);
      H.noalias() += (4.0 / (gap * gap)) * x * x.transpose();
      return H;
    }
    const Vector& h = domain_.halfwidths();
    Vector diag(d);
    for (int i = 0; i < d; ++i) {
      const double a = h[i] - x[i];
      const double b = h[i] + x[i];
      diag[i] = 1.0 / (a * a) + 1.0 / (b * b);
    }
    return diag.asDiagonal();
  }

 private:
  void require_interior(const Vector& x, const char* op) const {
    domain_.check_dim(x);
    if (!domain_.is_interior(x)) {
      std::ostringstream msg;
      msg << op << ": point is not interior (gauge " << domain_.gauge(x) << ")";
      throw DomainError(msg.str());
    }
  }

  Domain domain_;
  double nu_;
};

/// |h|_x = sqrt(h^T H(x) h).
inline double local_norm(const Barrier& b, const Vector& x, const Vector& h) {
  const double q = h.dot(b.hessian(x) * h);
  return std::sqrt(std::max(q, 0.0));
}

/// |h|*_x = sqrt(h^T H(x)^{-1} h).
inline double dual_local_norm(const Barrier& b, const Vector& x, const Vector& h) {
  Eigen::LLT<Matrix> llt(b.hessian(x));
  if (llt.info() != Eigen::Success) throw NumericalError("dual_local_norm: Hessian is not positive definite");
  const double q = h.dot(llt.solve(h));
  return std::sqrt(std::max(q, 0.0));
}

/// H^{-1/2} together with H^{1/2} from one symmetric eigendecomposition.
struct HessianFactor {
  Matrix inv_sqrt;  // A = H^{-1/2}
  Matrix sqrt;      // A^{-1} = H^{1/2}
  Vector eigenvalues;
};

inline HessianFactor hessian_inverse_sqrt(const Matrix& H) {
  if (H.rows() != H.cols() || H.rows() == 0) throw NumericalError("hessian_inverse_sqrt: matrix must be square and non-empty");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw NumericalError("hessian_inverse_sqrt: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
  if (eig.info() != Eigen::Success) throw NumericalError("hessian_inverse_sqrt: eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > 0.0)) {
    std::ostringstream msg;
    msg << "hessian_inverse_sqrt: matrix is not positive definite (smallest eigenvalue " << lambda.minCoeff() << ")";
    throw NumericalError(msg.str());
  }
  const Matrix& V = eig.eigenvectors();
  const Vector root = lambda.cwiseSqrt();
  HessianFactor f;
  f.inv_sqrt = V * root.cwiseInverse().asDiagonal() * V.transpose();
  f.sqrt = V * root.asDiagonal() * V.transpose();
  // Exact symmetry; the products above are symmetric only up to rounding.
  f.inv_sqrt = 0.5 * (f.inv_sqrt + f.inv_sqrt.transpose()).eval();
  f.sqrt = 0.5 * (f.sqrt + f.sqrt.transpose()).eval();
  f.eigenvalues = lambda;
  return f;
}

}  // namespace scrible

#endif  // SCRIBLE_BARRIER_HPP
