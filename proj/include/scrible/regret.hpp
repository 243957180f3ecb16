#ifndef SCRIBLE_REGRET_HPP
#define SCRIBLE_REGRET_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "scrible/adversary.hpp"
#include "scrible/error.hpp"
#include "scrible/geometry.hpp"
#include "scrible/learner.hpp"

namespace scrible {

/// Minimizer over K of <theta_sum, x>.
inline Vector linear_comparator(const Domain& domain, const Vector& theta_sum) {
  domain.check_dim(theta_sum);
  if (domain.is_ball()) {
    const double n = theta_sum.norm();
    if (n == 0.0) return Vector::Zero(domain.dim());
    return (-domain.radius() / n) * theta_sum;
  }
  const Vector& h = domain.halfwidths();
  Vector x(domain.dim());
  for (int i = 0; i < domain.dim(); ++i) {
    const double s = theta_sum[i];
    x[i] = s > 0.0 ? -h[i] : (s < 0.0 ? h[i] : 0.0);
  }
  return x;
}

inline Vector theta_sum(const LinearLossSequence& seq, int T) {
  if (T < 1 || T > seq.horizon()) throw ConfigError("theta_sum: horizon out of range");
  Vector s = Vector::Zero(seq.dim());
  for (int t = 1; t <= T; ++t) s += seq.theta(t);
  return s;
}

struct RegretReport {
  std::vector<double> cumulative_loss;
  Vector comparator_point;
  /// Total comparator loss over the episode.
  double comparator_loss = 0.0;
  std::vector<double> regret;
  /// Running sum of X_t = theta_t^T (y_t - x_t).
  std::vector<double> deviation_track;
  /// Running sum of (d sigma_t A_t^{-1} mu_t)^T (x_t - h).
  std::vector<double> error_track;
  /// Running regret of the linear part alone (sigma removed on both sides).
  std::vector<double> linear_regret;
  double budget_used = 0.0;

  double final_regret() const { return regret.empty() ? 0.0 : regret.back(); }
};

/// Regret against `comparator` over the recorded rounds. sigma at the comparator is
/// taken as zero; `comparator_sigma_total` (within [-C, C]) spreads a different
/// convention evenly over the rounds.
inline RegretReport compute_regret(const std::vector<RoundRecord>& records, const LinearLossSequence& linear,
                                   const Vector& comparator, double comparator_sigma_total = 0.0) {
  RegretReport rep;
  rep.comparator_point = comparator;
  const std::size_t T = records.size();
  if (T == 0) return rep;
  if (static_cast<int>(T) > linear.horizon()) throw ConfigError("compute_regret: more records than losses");
  const double sigma_share = comparator_sigma_total / static_cast<double>(T);
  const double d = static_cast<double>(comparator.size());

  rep.cumulative_loss.reserve(T);
  rep.regret.reserve(T);
  rep.deviation_track.reserve(T);
  rep.error_track.reserve(T);
  rep.linear_regret.reserve(T);
  double cum = 0.0, cmp = 0.0, dev = 0.0, err = 0.0, lin = 0.0, used = 0.0;
  for (const RoundRecord& r : records) {
    const Vector& theta = linear.theta(r.t);
    const double cmp_linear = theta.dot(comparator);
    cum += r.loss;
    cmp += cmp_linear + sigma_share;
    dev += theta.dot(r.y - r.x);
    err += (d * r.sigma) * r.a_inv_mu.dot(r.x - comparator);
    lin += theta.dot(r.y) - cmp_linear;
    used += std::abs(r.sigma);
    rep.cumulative_loss.push_back(cum);
    rep.regret.push_back(cum - cmp);
    rep.deviation_track.push_back(dev);
    rep.error_track.push_back(err);
    rep.linear_regret.push_back(lin);
  }
  rep.comparator_loss = cmp;
  rep.budget_used = used;
  return rep;
}

struct RegretInterval {
  double lower;
  double upper;
};

/// Interval for the true regret (argmin of sum f_t) given the linear-comparator
/// measurement and the budget C.
inline RegretInterval corrected_regret_interval(double measured, double C) {
  return {measured - 2.0 * C, measured + 2.0 * C};
}

struct DeltaChoice {
  double delta;
  bool clamped;
  std::optional<std::string> warning;
};

/// delta = 1/T^2 when C = 0, C/T otherwise; clamped into (0, 2/3].
inline DeltaChoice delta_policy(double C, int T) {
  if (T < 1) throw ConfigError("delta_policy: T must be >= 1");
  if (!(C >= 0.0)) throw ConfigError("delta_policy: C must be >= 0");
  const double Td = static_cast<double>(T);
  const double raw = C == 0.0 ? 1.0 / (Td * Td) : C / Td;
  if (raw > kMaxShrink) {
    return {kMaxShrink, true,
            "delta policy value " + std::to_string(raw) + " exceeds 2/3; clamped to 2/3"};
  }
  return {raw, false, std::nullopt};
}

struct BoundInputs {
  int d = 1;
  int T = 1;
  double nu = 1.0;
  double delta = 0.5;
  double C = 0.0;
  double G = 1.0;
  double D = 1.0;
  double gamma = 0.05;
  double eta = 0.0;  // informational; the bounds assume the Theorem 1 rate
};

namespace detail {
inline void check_bound_inputs(const BoundInputs& in) {
  if (in.d < 1) throw ConfigError("bound: d must be >= 1");
  if (in.T < 1) throw ConfigError("bound: T must be >= 1");
  if (!(in.delta > 0.0 && in.delta < 1.0)) throw ConfigError("bound: delta must lie in (0, 1)");
  if (!(in.nu > 0.0)) throw ConfigError("bound: nu must be > 0");
  if (!(in.C >= 0.0)) throw ConfigError("bound: C must be >= 0");
  if (!(in.G >= 0.0) || !(in.D >= 0.0)) throw ConfigError("bound: G and D must be >= 0");
}
}  // namespace detail

/// 4d sqrt(nu T ln(1/delta)) + 2Cd(nu + 2 sqrt(nu))(1 - delta)/delta + delta G D T + 2C.
inline double expected_bound(const BoundInputs& in) {
  detail::check_bound_inputs(in);
  const double d = in.d, T = in.T, nu = in.nu, delta = in.delta;
  return 4.0 * d * std::sqrt(nu * T * std::log(1.0 / delta)) +
         2.0 * in.C * d * (nu + 2.0 * std::sqrt(nu)) * (1.0 - delta) / delta + delta * in.G * in.D * T +
         2.0 * in.C;
}

/// Quantities of the martingale concentration step applied to X_t = theta_t^T (y_t - x_t).
struct MartingaleTerms {
  double b;       // almost-sure bound on X_t: G D
  double B_star;  // max_t B_t = b
  double V;       // variance proxy G^2 D^2 T
  double S;       // ceil(ln b) * ceil(ln(b^2 T))
  double term;    // S (sqrt(8 V ln(S/gamma)) + 2 B* ln(S/gamma))
};

inline MartingaleTerms martingale_terms(const BoundInputs& in) {
  detail::check_bound_inputs(in);
  if (!(in.gamma > 0.0 && in.gamma < 1.0)) throw ConfigError("bound: gamma must lie in (0, 1)");
  MartingaleTerms m;
  m.b = in.G * in.D;
  if (!(m.b > 1.0))
    throw ConfigError("highprob_bound: requires G*D > 1 (ceil(ln GD) would be <= 0), got G*D = " + std::to_string(m.b));
  m.B_star = m.b;
  m.V = m.b * m.b * in.T;
  m.S = std::ceil(std::log(m.b)) * std::ceil(std::log(m.b * m.b * in.T));
  const double l = std::log(m.S / in.gamma);
  m.term = m.S * (m.b * std::sqrt(8.0 * in.T * l) + 2.0 * m.b * l);
  return m;
}

inline double highprob_bound(const BoundInputs& in) { return expected_bound(in) + martingale_terms(in).term; }

}  // namespace scrible

#endif  // SCRIBLE_REGRET_HPP
