#ifndef SCRIBLE_HARNESS_LOWERBOUND_HPP
#define SCRIBLE_HARNESS_LOWERBOUND_HPP

#include <cstdint>

#include "scrible/adversary.hpp"
#include "scrible/learner.hpp"

namespace scrible::harness {

struct LowerBoundReport {
  double epsilon = 0.0;
  int T = 0;
  /// f(x_hat) - f(z); 2 epsilon by construction.
  double gap = 0.0;
  /// Budget of the perturbed sequence, epsilon T.
  double C = 0.0;
  /// Sequence-level regret floor 2C.
  double floor = 0.0;
  Vector x_hat;
  Vector z;
  int redraws = 0;
};

/// Runs the learner against the black-box adversary for T queries, picks the
/// best iterate and lets the adversary reveal its hidden minimizer.
inline LowerBoundReport lowerbound_demo(double epsilon, const LearnerConfig& cfg, std::uint64_t seed) {
  BlackBoxAdversary adversary(epsilon, cfg.domain(), cfg.horizon);
  const RngStream root(seed);
  RngStream actions = fork_stream(root, 2);
  RngStream reveal = fork_stream(root, 3);
  const auto records = run_episode(cfg, adversary, actions);

  LowerBoundReport r;
  r.epsilon = epsilon;
  r.T = cfg.horizon;
  r.x_hat = best_iterate(records);
  const auto outcome = adversary.finalize(r.x_hat, reveal);
  r.gap = outcome.gap;
  r.z = outcome.z;
  r.redraws = outcome.redraws;
  r.C = epsilon * cfg.horizon;
  r.floor = 2.0 * r.C;
  return r;
}

}  // namespace scrible::harness

#endif  // SCRIBLE_HARNESS_LOWERBOUND_HPP
