#ifndef SCRIBLE_HARNESS_VERIFY_HPP
#define SCRIBLE_HARNESS_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "scrible/adversary.hpp"
#include "scrible/barrier.hpp"
#include "scrible/ftrl.hpp"
#include "scrible/geometry.hpp"
#include "scrible/harness/experiment.hpp"
#include "scrible/harness/lowerbound.hpp"
#include "scrible/learner.hpp"
#include "scrible/oracles.hpp"
#include "scrible/random.hpp"
#include "scrible/regret.hpp"

namespace scrible::harness {

struct CheckResult {
  std::string name;
  long long samples = 0;
  /// Smallest slack observed against the check's threshold (negative means failure).
  double worst_margin = 0.0;
  bool passed = false;
  std::string detail;
};

namespace verify_detail {

inline Vector point_at_gauge(const Domain& K, RngStream& rng, double gauge) {
  const Vector u = sample_unit_sphere(rng, K.dim());
  if (K.is_ball()) return (gauge * K.radius()) * u;
  return (gauge / K.gauge(u)) * u;
}

/// Gauge 1 - 10^{-U(0, 8)} half of the time, uniform in K otherwise.
inline Vector boundary_biased(const Domain& K, RngStream& rng) {
  if (rng.uniform() < 0.5) return point_at_gauge(K, rng, 1.0 - std::pow(10.0, -rng.uniform(0.0, 8.0)));
  return sample_uniform_in(K, rng) * (1.0 - 1e-8);
}

inline std::string fmt(double v) {
  std::ostringstream o;
  o.precision(6);
  o << v;
  return o.str();
}

inline std::vector<Domain> test_domains() {
  Vector h(5);
  h << 1.0, 2.0, 3.0, 4.0, 5.0;
  return {Domain::ball(5, 5.0), Domain::box(h)};
}

}  // namespace verify_detail

/// Central differences of value and gradient against the closed forms.
inline CheckResult check_barrier() {
  using namespace verify_detail;
  CheckResult r{"barrier", 0, INFINITY, true, ""};
  RngStream rng(101);
  double worst_g = 0.0, worst_h = 0.0;
  for (const Domain& K : test_domains()) {
    const Barrier b(K);
    const double scale = K.is_ball() ? K.radius() : K.halfwidths().minCoeff();
    const double step = 1e-5 * scale;
    for (int i = 0; i < 200; ++i) {
      const Vector x = point_at_gauge(K, rng, rng.uniform(0.0, 0.9));
      const Vector g = b.gradient(x);
      const Matrix H = b.hessian(x);
      Vector fd_g(K.dim());
      Matrix fd_h(K.dim(), K.dim());
      for (int j = 0; j < K.dim(); ++j) {
        Vector e = Vector::Zero(K.dim());
        e[j] = step;
        fd_g[j] = (b.value(x + e) - b.value(x - e)) / (2.0 * step);
        fd_h.col(j) = (b.gradient(x + e) - b.gradient(x - e)) / (2.0 * step);
      }
      worst_g = std::max(worst_g, (fd_g - g).norm() / std::max(g.norm(), 1.0));
      worst_h = std::max(worst_h, (fd_h - H).norm() / std::max(H.norm(), 1.0));
      ++r.samples;
    }
  }
  r.worst_margin = std::min(1e-5 - worst_g, 1e-4 - worst_h);
  r.passed = r.worst_margin >= 0.0;
  r.detail = "max gradient rel err " + fmt(worst_g) + ", max Hessian rel err " + fmt(worst_h);
  return r;
}

/// x + h stays in K for |h|_x = 1, and |h|_y >= |h|_x (1 - |y - x|_x).
inline CheckResult check_dikin(long long trials_per_domain = 100000) {
  using namespace verify_detail;
  CheckResult r{"dikin", 0, INFINITY, true, ""};
  RngStream rng(202);
  long long violations = 0, norm_violations = 0;
  double worst_norm_margin = INFINITY;
  for (const Domain& K : test_domains()) {
    const Barrier b(K);
    for (long long i = 0; i < trials_per_domain; ++i) {
      const Vector x = boundary_biased(K, rng);
      const HessianFactor f = hessian_inverse_sqrt(b.hessian(x));
      const Vector h = f.inv_sqrt * sample_unit_sphere(rng, K.dim());
      const Vector p = x + h;
      r.worst_margin = std::min(r.worst_margin, 1.0 - K.gauge(p));
      if (!K.contains(p, 1e-12)) ++violations;
      ++r.samples;

      if (i % 10 == 0) {
        const double s = rng.uniform(0.0, 0.99);
        const Vector y = x + s * (f.inv_sqrt * sample_unit_sphere(rng, K.dim()));
        if (!K.is_interior(y)) continue;
        const Vector w = sample_unit_sphere(rng, K.dim());
        const double hx = local_norm(b, x, w), hy = local_norm(b, y, w);
        const double margin = (hy - hx * (1.0 - s)) / std::max(1.0, hx);
        worst_norm_margin = std::min(worst_norm_margin, margin);
        if (margin < -1e-9) ++norm_violations;
      }
    }
  }
  r.passed = violations == 0 && norm_violations == 0;
  r.detail = std::to_string(violations) + " containment violations, " + std::to_string(norm_violations) +
             " norm-inequality violations (worst relative slack " + fmt(worst_norm_margin) + ")";
  return r;
}

/// R(z) - R(x) <= nu ln(1 / (1 - pi_x(z))) on the ball.
inline CheckResult check_lemma2(long long trials = 10000) {
  using namespace verify_detail;
  CheckResult r{"lemma2", 0, INFINITY, true, ""};
  RngStream rng(303);
  const Domain K = Domain::ball(5, 5.0);
  const Barrier b(K);
  long long violations = 0;
  for (long long i = 0; i < trials; ++i) {
    const Vector x = boundary_biased(K, rng);
    const Vector z = boundary_biased(K, rng);
    const double pi = minkowski_gauge(K, x, z);
    const double rhs = b.nu() * std::log(1.0 / (1.0 - pi));
    const double margin = rhs + 1e-9 - (b.value(z) - b.value(x));
    r.worst_margin = std::min(r.worst_margin, margin);
    if (margin < 0.0) ++violations;
    ++r.samples;
  }
  r.passed = violations == 0;
  r.detail = std::to_string(violations) + " violations";
  return r;
}

/// |y - x|_x <= 2 (1/delta - 1)(nu + 2 sqrt(nu)) for x, y in K_delta.
inline CheckResult check_lemma3(long long trials_per_delta = 10000) {
  using namespace verify_detail;
  CheckResult r{"lemma3", 0, INFINITY, true, ""};
  RngStream rng(404);
  long long violations = 0;
  for (const Domain& K : test_domains()) {
    const Barrier b(K);
    for (double delta : {0.1, 0.5, 2.0 / 3.0}) {
      const double bound = 2.0 * (1.0 / delta - 1.0) * (b.nu() + 2.0 * std::sqrt(b.nu()));
      const double g = 1.0 - delta;
      for (long long i = 0; i < trials_per_delta; ++i) {
        const bool edge = i % 2 == 0;
        const Vector x = edge ? point_at_gauge(K, rng, 0.999 * g) : g * sample_uniform_in(K, rng);
        const Vector y = edge ? point_at_gauge(K, rng, 0.999 * g) : g * sample_uniform_in(K, rng);
        const double margin = bound + 1e-9 - local_norm(b, x, y - x);
        r.worst_margin = std::min(r.worst_margin, margin / bound);
        if (margin < 0.0) ++violations;
        ++r.samples;
      }
    }
  }
  r.passed = violations == 0;
  r.detail = std::to_string(violations) + " violations (margin relative to the bound)";
  return r;
}

struct Lemma4Outcome {
  StepStats fixture;
  StepStats wide_episode;
};

inline Lemma4Outcome lemma4_runs() {
  ExperimentConfig fixture;
  fixture.T = 2000;
  fixture.d = 5;
  fixture.D = 1.0;
  fixture.G = 0.1;
  fixture.eta = EtaPreset::kTheorem1;
  fixture.algorithms = {kAlgorithm1};
  fixture.master_seed = 4;
  ExperimentConfig wide = fixture;
  wide.D = 5.0;
  wide.G = 3.0;
  return {run_experiment_in_memory(fixture).summaries.front().steps,
          run_experiment_in_memory(wide).summaries.front().steps};
}

/// Step size |x_{t+1} - x_t|_{x_t} < 4 d eta: always when |f| <= 1, rounds with
/// |f| > 1 over the bound are reported as warnings.
inline CheckResult check_lemma4() {
  using namespace verify_detail;
  const Lemma4Outcome o = lemma4_runs();
  CheckResult r{"lemma4", o.fixture.rounds + o.wide_episode.rounds, 0.0, true, ""};
  r.worst_margin = 1.0 - std::max(o.fixture.max_ratio, o.wide_episode.max_ratio_covered);
  r.passed = o.fixture.within == o.fixture.rounds && o.wide_episode.violations == 0 &&
             o.wide_episode.fraction_within_covered() >= 0.999;
  r.detail = "fixture |f|<=0.1: " + std::to_string(o.fixture.within) + "/" + std::to_string(o.fixture.rounds) +
             " within; G=3 D=5 episode: " + std::to_string(o.wide_episode.within) + "/" +
             std::to_string(o.wide_episode.rounds) + " within, " + std::to_string(o.wide_episode.excused) +
             " warnings with |f|>1, " + std::to_string(o.wide_episode.violations) + " violations with |f|<=1";
  return r;
}

struct Lemma5Outcome {
  Vector theta;
  Vector mean;
  Vector standard_error;
  double max_z = 0.0;
};

/// Monte Carlo mean of the one-point estimator for an exactly linear loss.
inline Lemma5Outcome lemma5_run(long long draws = 200000) {
  const Domain K = Domain::ball(5, 5.0);
  const Barrier b(K);
  RngStream rng(505);
  const Vector x = 2.5 * sample_unit_sphere(rng, 5);
  const Vector theta = 3.0 * sample_unit_sphere(rng, 5);
  const HessianFactor f = hessian_inverse_sqrt(b.hessian(x));
  Vector sum = Vector::Zero(5), sum_sq = Vector::Zero(5);
  for (long long i = 0; i < draws; ++i) {
    const Vector mu = sample_unit_sphere(rng, 5);
    const Vector y = x + f.inv_sqrt * mu;
    const Estimate e = one_point_estimate(b, x, f, theta.dot(y), mu);
    sum += e.g;
    sum_sq += e.g.cwiseProduct(e.g);
  }
  const double n = static_cast<double>(draws);
  Lemma5Outcome o;
  o.theta = theta;
  o.mean = sum / n;
  const Vector var = (sum_sq / n - o.mean.cwiseProduct(o.mean)) * (n / (n - 1.0));
  o.standard_error = (var / n).cwiseSqrt();
  o.max_z = ((o.mean - theta).cwiseAbs().array() / o.standard_error.array()).maxCoeff();
  return o;
}

inline CheckResult check_lemma5() {
  using namespace verify_detail;
  const Lemma5Outcome o = lemma5_run();
  CheckResult r{"lemma5", 200000, 4.0 - o.max_z, o.max_z <= 4.0, ""};
  r.detail = "max |mean(g) - theta| / SE = " + fmt(o.max_z);
  return r;
}

/// Structured FTRL solver against the bisection oracle.
inline double ftrl_oracle_worst(long long instances = 1000) {
  RngStream rng(606);
  double worst = 0.0;
  for (long long i = 0; i < instances; ++i) {
    const int d = 1 + static_cast<int>(rng.uniform() * 6.0);
    Domain K = Domain::ball(d, rng.uniform(1.0, 6.0));
    if (i % 2) {
      Vector h(d);
      for (int j = 0; j < d; ++j) h[j] = rng.uniform(1.0, 5.0);
      K = Domain::box(h);
    }
    const double delta = i % 3 == 0 ? 0.0 : (i % 3 == 1 ? 0.2 : 0.5);
    const Vector linear = std::pow(10.0, rng.uniform(-3.0, 3.0)) * sample_unit_sphere(rng, d);
    const Vector x = solve_ftrl(Barrier(K), linear, delta).x;
    worst = std::max(worst, (x - oracle::ftrl_bisection(K, linear, delta)).norm());
  }
  return worst;
}

inline CheckResult check_ftrl_oracle() {
  const double worst = ftrl_oracle_worst();
  return {"ftrl_oracle", 1000, 1e-8 - worst, worst <= 1e-8, "max deviation " + verify_detail::fmt(worst)};
}

struct BudgetOutcome {
  double C;
  double attempted;
  double charged;
  int clips;
};

/// Spikes totalling 1.5 C against the accountant.
inline BudgetOutcome budget_run() {
  const Domain K = Domain::ball(3, 2.0);
  RngStream rng(707);
  auto seq = std::make_shared<const LinearLossSequence>(gen_linear_sequence(rng, 100, 3, 1.0));
  SpikeList spikes;
  for (int t = 1; t <= 100; t += 4) spikes.magnitudes[t] = (t % 8 == 1 ? 0.6 : -0.6);
  double attempted = 0.0;
  for (const auto& [t, m] : spikes.magnitudes) attempted += std::abs(m);
  const double C = attempted / 1.5;
  LossOracle oracle(seq, PerturbationSchedule{spikes, C, std::numeric_limits<double>::infinity()}, K);
  double charged = 0.0;
  for (int t = 1; t <= 100; ++t) {
    charged += std::abs(oracle.evaluate_loss(sample_uniform_in(K, rng), t).sigma);
    if (charged > C + 1e-12) break;
  }
  return {C, attempted, charged, oracle.accountant().clip_count()};
}

inline CheckResult check_budget() {
  using namespace verify_detail;
  const BudgetOutcome o = budget_run();
  CheckResult r{"budget", 100, o.C + 1e-12 - o.charged, o.charged <= o.C + 1e-12 && o.clips > 0, ""};
  r.detail = "attempted " + fmt(o.attempted) + ", charged " + fmt(o.charged) + " of C = " + fmt(o.C) + ", " +
             std::to_string(o.clips) + " clips";
  return r;
}

inline CheckResult check_lowerbound() {
  using namespace verify_detail;
  const Domain K = Domain::ball(5, 5.0);
  const double eps = 0.01;
  const int T = 1000;
  const LowerBoundReport a = lowerbound_demo(eps, make_learner_config(K, T, delta_policy(eps * T, T).delta), 808);
  const LowerBoundReport b = lowerbound_demo(eps, make_learner_config(K, T, 0.0), 809);
  CheckResult r{"lowerbound", 2LL * T, 0.0, false, ""};
  r.passed = a.gap == 2.0 * eps && b.gap == a.gap && a.floor == 2.0 * eps * T;
  r.worst_margin = std::min(a.gap, b.gap) - 2.0 * eps;
  r.detail = "gap " + fmt(a.gap) + " (algorithm1), " + fmt(b.gap) + " (baseline), floor 2C = " + fmt(a.floor);
  return r;
}

struct MartingaleOutcome {
  int episodes;
  double mean;
  double sample_std;
  double max_decomposition_error;
};

/// Final deviation track over R episodes sharing the loss stream.
inline MartingaleOutcome martingale_run(int R = 200, int T = 200) {
  const Domain K = Domain::ball(5, 5.0);
  RngStream loss_rng(909);
  const LinearLossSequence seq = gen_linear_sequence(loss_rng, T, 5, 3.0);
  auto shared = std::make_shared<const LinearLossSequence>(seq);
  const Vector h = linear_comparator(K, theta_sum(seq, T));
  const LearnerConfig cfg = make_learner_config(K, T, 1.0 / (static_cast<double>(T) * T));
  std::vector<double> finals;
  double max_err = 0.0;
  for (int e = 0; e < R; ++e) {
    LossOracle oracle(shared, PerturbationSchedule{}, K);
    RngStream actions = fork_stream(RngStream(910), static_cast<std::uint64_t>(e));
    const auto records = run_episode(cfg, oracle, actions);
    const RegretReport rep = compute_regret(records, seq, h);
    finals.push_back(rep.deviation_track.back());
    for (const RoundRecord& r : records) {
      const Vector& th = seq.theta(r.t);
      const double lhs = th.dot(r.y - h);
      const double rhs = th.dot(r.y - r.x) + th.dot(r.x - h);
      max_err = std::max(max_err, std::abs(lhs - rhs));
    }
  }
  double mean = 0.0;
  for (double v : finals) mean += v / R;
  double ss = 0.0;
  for (double v : finals) ss += (v - mean) * (v - mean);
  return {R, mean, std::sqrt(ss / (R - 1)), max_err};
}

inline CheckResult check_martingale() {
  using namespace verify_detail;
  const MartingaleOutcome o = martingale_run();
  const double limit = 4.0 * o.sample_std / std::sqrt(static_cast<double>(o.episodes));
  CheckResult r{"martingale", o.episodes, limit - std::abs(o.mean), false, ""};
  r.passed = std::abs(o.mean) <= limit && o.max_decomposition_error <= 1e-9;
  r.detail = "mean final deviation " + fmt(o.mean) + " vs 4 SE " + fmt(limit) + ", max decomposition error " +
             fmt(o.max_decomposition_error);
  return r;
}

inline const std::vector<std::string>& verify_check_names() {
  static const std::vector<std::string> names{"barrier", "dikin",       "lemma2", "lemma3",     "lemma4",
                                              "lemma5",  "ftrl_oracle", "budget", "lowerbound", "martingale"};
  return names;
}

/// Runs the named checks (all when empty). Unknown names are configuration errors.
inline std::vector<CheckResult> verify(const std::vector<std::string>& suite = {}) {
  const std::vector<std::string>& names = suite.empty() ? verify_check_names() : suite;
  for (const auto& n : names)
    if (std::find(verify_check_names().begin(), verify_check_names().end(), n) == verify_check_names().end())
      throw ConfigError("unknown verify check '" + n + "'");
  std::vector<CheckResult> out;
  for (const auto& n : names) {
    if (n == "barrier") out.push_back(check_barrier());
    else if (n == "dikin") out.push_back(check_dikin());
    else if (n == "lemma2") out.push_back(check_lemma2());
    else if (n == "lemma3") out.push_back(check_lemma3());
    else if (n == "lemma4") out.push_back(check_lemma4());
    else if (n == "lemma5") out.push_back(check_lemma5());
    else if (n == "ftrl_oracle") out.push_back(check_ftrl_oracle());
    else if (n == "budget") out.push_back(check_budget());
    else if (n == "lowerbound") out.push_back(check_lowerbound());
    else out.push_back(check_martingale());
  }
  return out;
}

}  // namespace scrible::harness

#endif  // SCRIBLE_HARNESS_VERIFY_HPP
