#ifndef SCRIBLE_LOSS_HPP
#define SCRIBLE_LOSS_HPP

namespace scrible {

/// One bandit feedback value, split into its linear part and perturbation.
/// The learner only ever sees `value`; the split is kept for accounting.
struct LossSample {
  double value = 0.0;
  double linear = 0.0;
  double sigma = 0.0;
};

}  // namespace scrible

#endif  // SCRIBLE_LOSS_HPP
