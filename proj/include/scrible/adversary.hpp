#ifndef SCRIBLE_ADVERSARY_HPP
#define SCRIBLE_ADVERSARY_HPP

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "scrible/error.hpp"
#include "scrible/geometry.hpp"
#include "scrible/loss.hpp"
#include "scrible/random.hpp"

namespace scrible {

/// Oblivious linear losses theta_1..theta_T with |theta_t| <= G.
struct LinearLossSequence {
  std::vector<Vector> thetas;
  double G = 0.0;

  int horizon() const { return static_cast<int>(thetas.size()); }
  int dim() const { return thetas.empty() ? 0 : static_cast<int>(thetas.front().size()); }
  const Vector& theta(int t) const { return thetas.at(static_cast<std::size_t>(t - 1)); }
};

/// theta_t = r u with u uniform on the sphere and r uniform on [0, G].
inline LinearLossSequence gen_linear_sequence(RngStream& rng, int T, int d, double G) {
  if (T < 1 || d < 1) throw ConfigError("gen_linear_sequence: T and d must be >= 1");
  if (!(G >= 0.0)) throw ConfigError("gen_linear_sequence: G must be >= 0");
  LinearLossSequence seq;
  seq.G = G;
  seq.thetas.reserve(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    const Vector u = sample_unit_sphere(rng, d);
    seq.thetas.push_back(rng.uniform(0.0, G) * u);
  }
  return seq;
}

struct NoPerturbation {};

/// sigma(y) = epsilon sin(pi y^T l), plus `offset` once gauge(y) >= boundary_threshold.
struct Sinusoidal {
  double epsilon = 0.0;
  Vector direction;
  double offset = 0.0;
  double boundary_threshold = 0.95;
};

/// Fixed per-round magnitudes (1-based round -> sigma).
struct SpikeList {
  std::map<int, double> magnitudes;
};

struct PerturbationSchedule {
  std::variant<NoPerturbation, Sinusoidal, SpikeList> kind = NoPerturbation{};
  /// Declared budget C on sum_t |sigma_t(y_t)|.
  double budget = 0.0;
  /// Per-round cap on |sigma|; defaults to 1 + offset. Infinity disables it.
  std::optional<double> sigma_cap;

  double offset() const {
    if (const auto* s = std::get_if<Sinusoidal>(&kind)) return s->offset;
    return 0.0;
  }
  double effective_cap() const { return sigma_cap.value_or(1.0 + std::abs(offset())); }
};

/// Checks the approximately-linear regime C / T <= 2/3. Returns a warning when
/// the constraint is violated but explicitly allowed, throws otherwise.
inline std::optional<std::string> check_regime(double C, int T, bool allow_violation) {
  if (!(C >= 0.0)) throw ConfigError("perturbation budget C must be >= 0");
  if (T < 1) throw ConfigError("horizon must be >= 1");
  if (C / T <= 2.0 / 3.0) return std::nullopt;
  const std::string msg = "budget ratio C/T = " + std::to_string(C / T) + " exceeds 2/3";
  if (!allow_violation) throw ConfigError(msg + " (set allow_regime_violation to override)");
  return "warning: " + msg;
}

/// Running sum of charged |sigma|, never above C.
class BudgetAccountant {
 public:
  explicit BudgetAccountant(double C = 0.0) : C_(C) {
    if (!(C >= 0.0)) throw ConfigError("BudgetAccountant: C must be >= 0");
  }

  double budget() const { return C_; }
  double used() const { return used_; }
  double remaining() const { return std::max(0.0, C_ - used_); }
  int clip_count() const { return clips_; }

  /// Clips sigma toward zero so the charge fits the remaining budget, charges it, returns it.
  double charge(double sigma) {
    const double room = remaining();
    if (std::abs(sigma) > room) {
      ++clips_;
      sigma = std::copysign(room, sigma);
      used_ = C_;
      return sigma;
    }
    used_ += std::abs(sigma);
    return sigma;
  }

 private:
  double C_;
  double used_ = 0.0;
  int clips_ = 0;
};

/// Raw sigma before capping and budget clipping.
inline double raw_perturbation(const PerturbationSchedule& schedule, const Domain& domain, const Vector& y, int t) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NoPerturbation>) {
          return 0.0;
        } else if constexpr (std::is_same_v<K, Sinusoidal>) {
          double s = k.epsilon * std::sin(y.dot(k.direction) * std::numbers::pi);
          if (domain.gauge(y) >= k.boundary_threshold) s += k.offset;
          return s;
        } else {
          const auto it = k.magnitudes.find(t);
          return it == k.magnitudes.end() ? 0.0 : it->second;
        }
      },
      schedule.kind);
}

/// sigma_t(y): raw value, capped per round, then clipped to the remaining budget and charged.
inline double evaluate_perturbation(const PerturbationSchedule& schedule, BudgetAccountant& accountant,
                                    const Domain& domain, const Vector& y, int t, int* cap_clips = nullptr) {
  if (std::holds_alternative<NoPerturbation>(schedule.kind)) return 0.0;
  double s = raw_perturbation(schedule, domain, y, t);
  const double cap = schedule.effective_cap();
  if (std::abs(s) > cap) {
    s = std::copysign(cap, s);
    if (cap_clips) ++*cap_clips;
  }
  return accountant.charge(s);
}

/// f_t(y) = theta_t^T y + sigma_t(y), with sigma charged to the budget accountant.
/// Copies share the immutable linear sequence and own their accountant.
class LossOracle {
 public:
  LossOracle(std::shared_ptr<const LinearLossSequence> linear, PerturbationSchedule schedule, Domain domain)
      : linear_(std::move(linear)),
        schedule_(std::move(schedule)),
        accountant_(schedule_.budget),
        domain_(std::move(domain)) {
    if (!linear_ || linear_->horizon() < 1) throw ConfigError("LossOracle: empty linear sequence");
    if (linear_->dim() != domain_.dim()) throw ConfigError("LossOracle: dimension mismatch");
    if (const auto* s = std::get_if<Sinusoidal>(&schedule_.kind)) domain_.check_dim(s->direction);
  }

  int horizon() const { return linear_->horizon(); }
  const LinearLossSequence& linear() const { return *linear_; }
  const PerturbationSchedule& schedule() const { return schedule_; }
  const BudgetAccountant& accountant() const { return accountant_; }
  const Domain& domain() const { return domain_; }
  int cap_clip_count() const { return cap_clips_; }

  LossSample evaluate_loss(const Vector& y, int t) {
    if (t < 1 || t > horizon()) throw ConfigError("evaluate_loss: round out of range");
    if (!domain_.contains(y, 1e-12)) throw DomainError("evaluate_loss: y lies outside K");
    LossSample s;
    s.linear = linear_->theta(t).dot(y);
    s.sigma = evaluate_perturbation(schedule_, accountant_, domain_, y, t, &cap_clips_);
    s.value = s.linear + s.sigma;
    return s;
  }

 private:
  std::shared_ptr<const LinearLossSequence> linear_;
  PerturbationSchedule schedule_;
  BudgetAccountant accountant_;
  Domain domain_;
  int cap_clips_ = 0;
};

/// Black-box adversary for the lower bound: every query answers +epsilon; on
/// finalization a hidden point z, distinct from every queried point and from the
/// reported minimizer, is revealed with f(z) = -epsilon.
class BlackBoxAdversary {
 public:
  BlackBoxAdversary(double epsilon, Domain domain, int horizon)
      : epsilon_(epsilon), domain_(std::move(domain)), horizon_(horizon) {
    if (!(epsilon > 0.0)) throw ConfigError("BlackBoxAdversary: epsilon must be > 0");
    if (horizon < 1) throw ConfigError("BlackBoxAdversary: horizon must be >= 1");
  }

  double epsilon() const { return epsilon_; }
  bool finalized() const { return finalized_; }
  const std::vector<Vector>& queried() const { return queried_; }
  int horizon() const { return horizon_; }

  double query(const Vector& x) {
    if (finalized_) throw ProtocolError("BlackBoxAdversary: query after finalization");
    domain_.check_dim(x);
    queried_.push_back(x);
    return epsilon_;
  }

  LossSample evaluate_loss(const Vector& y, int /*t*/) {
    const double v = query(y);
    return {v, 0.0, v};
  }

  struct Outcome {
    double gap;
    Vector z;
    int redraws;
  };

  /// Draws z uniformly in K avoiding queried points and x_hat (bitwise), and
  /// returns f(x_hat) - f(z).
  Outcome finalize(const Vector& x_hat, RngStream& rng) {
    if (finalized_) throw ProtocolError("BlackBoxAdversary: already finalized");
    domain_.check_dim(x_hat);
    Outcome out{0.0, Vector(), 0};
    for (;;) {
      out.z = sample_uniform_in(domain_, rng);
      if (!same_bits(out.z, x_hat) &&
          std::none_of(queried_.begin(), queried_.end(), [&](const Vector& q) { return same_bits(q, out.z); }))
        break;
      ++out.redraws;
    }
    finalized_ = true;
    z_ = out.z;
    out.gap = value_at(x_hat) - value_at(out.z);
    return out;
  }

  /// The function after finalization: -epsilon at z, +epsilon elsewhere.
  double value_at(const Vector& x) const {
    if (finalized_ && same_bits(x, z_)) return -epsilon_;
    return epsilon_;
  }

  static bool same_bits(const Vector& a, const Vector& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
  }

 private:
  double epsilon_;
  Domain domain_;
  int horizon_;
  std::vector<Vector> queried_;
  bool finalized_ = false;
  Vector z_;
};

}  // namespace scrible

#endif  // SCRIBLE_ADVERSARY_HPP
