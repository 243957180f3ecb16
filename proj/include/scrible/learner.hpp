#ifndef SCRIBLE_LEARNER_HPP
#define SCRIBLE_LEARNER_HPP

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scrible/barrier.hpp"
#include "scrible/error.hpp"
#include "scrible/ftrl.hpp"
#include "scrible/geometry.hpp"
#include "scrible/loss.hpp"
#include "scrible/random.hpp"

namespace scrible {

/// Learning-rate formulas used in the analysis and the experiments.
enum class EtaPreset {
  kTheorem1,      // sqrt(nu ln(1/delta)) / (2 d sqrt(T))
  kPaperSec7,     // sqrt(ln(1/delta)) / (4 d sqrt(T))
  kTheorem2Proof  // sqrt(nu ln T) / (2 d sqrt(T))
};

/// delta used inside the eta formula. The delta = 0 baseline has ln(1/delta) = inf,
/// so it takes the unperturbed choice 1/T^2 instead.
inline double eta_delta(double delta, int horizon) {
  if (delta > 0.0) return delta;
  const double T = std::max(horizon, 2);
  return 1.0 / (T * T);
}

inline double preset_learning_rate(EtaPreset preset, double nu, int d, int horizon, double delta) {
  if (d < 1 || horizon < 1) throw ConfigError("learning rate: d and T must be >= 1");
  const double de = eta_delta(delta, horizon);
  const double root_t = std::sqrt(static_cast<double>(horizon));
  switch (preset) {
    case EtaPreset::kTheorem1:
      return std::sqrt(nu * std::log(1.0 / de)) / (2.0 * d * root_t);
    case EtaPreset::kPaperSec7:
      return std::sqrt(std::log(1.0 / de)) / (4.0 * d * root_t);
    case EtaPreset::kTheorem2Proof:
      return std::sqrt(nu * std::log(std::max(horizon, 2))) / (2.0 * d * root_t);
  }
  throw ConfigError("unknown learning-rate preset");
}

struct LearnerConfig {
  int horizon;
  double eta;
  /// 0 selects the SCRiBLe baseline (update over K); (0, 2/3] updates over K_delta.
  double delta;
  Barrier barrier;
  double solver_tolerance = 1e-10;
  int max_iterations = 200;
  /// Throw on a step-size bound violation in rounds with |f_t| <= 1.
  bool verify_lemma4 = false;

  const Domain& domain() const { return barrier.domain(); }

  void validate() const {
    if (horizon < 1) throw ConfigError("LearnerConfig: horizon must be >= 1");
    if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("LearnerConfig: eta must be positive and finite");
    if (!(delta >= 0.0 && delta <= kMaxShrink)) throw ConfigError("LearnerConfig: delta must lie in [0, 2/3]");
    if (!(solver_tolerance > 0.0)) throw ConfigError("LearnerConfig: solver_tolerance must be positive");
    if (max_iterations < 1) throw ConfigError("LearnerConfig: max_iterations must be >= 1");
  }
};

inline LearnerConfig make_learner_config(const Domain& domain, int horizon, double delta,
                                         EtaPreset preset = EtaPreset::kTheorem1) {
  Barrier barrier(domain);
  const double eta = preset_learning_rate(preset, barrier.nu(), domain.dim(), horizon, delta);
  LearnerConfig cfg{horizon, eta, delta, std::move(barrier)};
  cfg.validate();
  return cfg;
}

struct LearnerState {
  int t = 1;
  Vector x;
  Vector grad_sum;
  HessianFactor hess_factor;
};

struct Proposal {
  Vector y;
  Vector mu;
};

struct Estimate {
  Vector g;
  /// A_t^{-1} mu_t, reused by the error-term accounting.
  Vector a_inv_mu;
  /// |g|*_{x_t}, computed by an independent Cholesky solve.
  double dual_norm;
};

struct UpdateInfo {
  /// |x_{t+1} - x_t|_{x_t}.
  double step_local_norm;
  double solver_residual;
  bool constrained;
};

/// g = d * loss * A^{-1} mu at x, with A = H(x)^{-1/2} given by `factor`.
inline Estimate one_point_estimate(const Barrier& barrier, const Vector& x, const HessianFactor& factor, double loss,
                                   const Vector& mu) {
  const int d = barrier.domain().dim();
  Estimate e;
  e.a_inv_mu = factor.sqrt * mu;
  e.g = (static_cast<double>(d) * loss) * e.a_inv_mu;
  e.dual_norm = dual_local_norm(barrier, x, e.g);
  return e;
}

/// Per-round log of one episode.
struct RoundRecord {
  int t;
  Vector x;
  Vector mu;
  Vector y;
  double loss;
  double linear_loss;
  /// Adversary-reported sigma_t(y_t); accounting only, never seen by the learner.
  double sigma;
  Vector g;
  Vector a_inv_mu;
  double estimator_dual_norm;
  double step_local_norm;
  double solver_residual;
};

/// Shrunk-domain SCRiBLe. Each round follows the fixed protocol
/// propose_action -> build_estimator -> ftrl_update; any other order throws ProtocolError.
class ScribleLearner {
 public:
  explicit ScribleLearner(LearnerConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const int d = cfg_.domain().dim();
    // Both supported bodies are centrally symmetric, so the barrier is minimized at the center.
    state_.x = Vector::Zero(d);
    state_.grad_sum = Vector::Zero(d);
    state_.hess_factor = hessian_inverse_sqrt(cfg_.barrier.hessian(state_.x));
  }

  const LearnerConfig& config() const { return cfg_; }
  const LearnerState& state() const { return state_; }
  int dim() const { return cfg_.domain().dim(); }

  Proposal propose_action(RngStream& rng) { return propose_with(sample_unit_sphere(rng, dim())); }

  /// propose_action with a caller-supplied direction (must be a unit vector).
  Proposal propose_with(const Vector& mu) {
    if (phase_ != Phase::kPropose) throw ProtocolError("propose_action: previous proposal has not been completed by an update");
    cfg_.domain().check_dim(mu);
    Vector y = state_.x + state_.hess_factor.inv_sqrt * mu;
    if (!cfg_.domain().contains(y, 1e-12)) {
      std::ostringstream msg;
      msg << "propose_action: y_t left K (gauge " << cfg_.domain().gauge(y) << ") at round " << state_.t;
      throw InvariantViolation(msg.str());
    }
    pending_mu_ = mu;
    phase_ = Phase::kEstimate;
    return {std::move(y), mu};
  }

  /// g = d * loss * A^{-1} mu, with A^{-1} = H^{1/2} from the cached eigendecomposition.
  Estimate build_estimator(double loss) {
    if (phase_ != Phase::kEstimate) throw ProtocolError("build_estimator: no matching proposal");
    if (!std::isfinite(loss)) throw DomainError("build_estimator: loss is not finite");
    Estimate e = one_point_estimate(cfg_.barrier, state_.x, state_.hess_factor, loss, pending_mu_);
    const double expected = dim() * std::abs(loss);
    if (std::abs(e.dual_norm - expected) > 1e-9 * std::max(1.0, expected)) {
      std::ostringstream msg;
      msg << "build_estimator: dual-norm identity failed (" << e.dual_norm << " vs " << expected << ")";
      throw InvariantViolation(msg.str());
    }
    phase_ = Phase::kUpdate;
    return e;
  }

  UpdateInfo ftrl_update(const Vector& g) {
    if (phase_ != Phase::kUpdate) throw ProtocolError("ftrl_update: estimator for the current proposal has not been built");
    cfg_.domain().check_dim(g);
    state_.grad_sum += g;
    const FtrlSolution sol =
        solve_ftrl(cfg_.barrier, cfg_.eta * state_.grad_sum, cfg_.delta, cfg_.solver_tolerance, cfg_.max_iterations);
    check_feasible(sol.x);

    UpdateInfo info;
    info.step_local_norm = local_norm(cfg_.barrier, state_.x, sol.x - state_.x);
    info.solver_residual = sol.residual;
    info.constrained = sol.constrained;
    state_.x = sol.x;
    state_.hess_factor = hessian_inverse_sqrt(cfg_.barrier.hessian(state_.x));
    ++state_.t;
    phase_ = Phase::kPropose;
    return info;
  }

  /// Radius of the step-size guarantee: |x_{t+1} - x_t|_{x_t} < 4 d eta.
  double step_bound() const { return 4.0 * dim() * cfg_.eta; }

 private:
  enum class Phase { kPropose, kEstimate, kUpdate };

  void check_feasible(const Vector& x) const {
    const Domain& K = cfg_.domain();
    const bool in_shrunk = cfg_.delta == 0.0 || K.gauge(x) <= (1.0 - cfg_.delta) * (1.0 + 1e-12);
    if (!in_shrunk || !K.is_interior(x)) {
      std::ostringstream msg;
      msg << "ftrl_update: iterate left K_delta (gauge " << K.gauge(x) << ", delta " << cfg_.delta << ")";
      throw InvariantViolation(msg.str());
    }
  }

  LearnerConfig cfg_;
  LearnerState state_;
  Phase phase_ = Phase::kPropose;
  Vector pending_mu_;
};

inline ScribleLearner init_learner(const LearnerConfig& cfg) { return ScribleLearner(cfg); }

/// Runs T rounds against `oracle`, which must provide
///   int horizon() const;
///   LossSample evaluate_loss(const Vector& y, int t);   // t is 1-based
template <class Oracle>
std::vector<RoundRecord> run_episode(const LearnerConfig& cfg, Oracle& oracle, RngStream& rng) {
  if (oracle.horizon() < cfg.horizon) throw ConfigError("run_episode: oracle horizon is shorter than T");
  ScribleLearner learner(cfg);
  std::vector<RoundRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.horizon));
  for (int t = 1; t <= cfg.horizon; ++t) {
    RoundRecord rec;
    rec.t = t;
    rec.x = learner.state().x;
    Proposal p = learner.propose_action(rng);
    const LossSample loss = oracle.evaluate_loss(p.y, t);
    Estimate e = learner.build_estimator(loss.value);
    const UpdateInfo u = learner.ftrl_update(e.g);
    if (cfg.verify_lemma4 && std::abs(loss.value) <= 1.0 && !(u.step_local_norm < learner.step_bound())) {
      std::ostringstream msg;
      msg << "step bound violated at round " << t << ": " << u.step_local_norm << " >= " << learner.step_bound();
      throw InvariantViolation(msg.str());
    }
    rec.mu = std::move(p.mu);
    rec.y = std::move(p.y);
    rec.loss = loss.value;
    rec.linear_loss = loss.linear;
    rec.sigma = loss.sigma;
    rec.g = std::move(e.g);
    rec.a_inv_mu = std::move(e.a_inv_mu);
    rec.estimator_dual_norm = e.dual_norm;
    rec.step_local_norm = u.step_local_norm;
    rec.solver_residual = u.solver_residual;
    records.push_back(std::move(rec));
  }
  return records;
}

/// Online-to-offline conversion: the played point with the smallest observed
/// loss; ties go to the earliest round.
inline Vector best_iterate(const std::vector<RoundRecord>& records) {
  if (records.empty()) throw ConfigError("best_iterate: no records");
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].loss < records[best].loss) best = i;
  return records[best].y;
}

}  // namespace scrible

#endif  // SCRIBLE_LEARNER_HPP
