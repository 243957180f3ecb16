#include <algorithm>
#include <cmath>
#include <memory>

#include <gtest/gtest.h>

#include "scrible/adversary.hpp"
#include "scrible/learner.hpp"
#include "scrible/regret.hpp"

namespace scrible {
namespace {

BoundInputs reference_inputs() {
  BoundInputs in;
  in.d = 5;
  in.T = 2000;
  in.nu = 1.0;
  in.delta = 1.0 / (2000.0 * 2000.0);
  in.C = 0.0;
  in.G = 3.0;
  in.D = 5.0;
  in.gamma = 0.01;
  return in;
}

TEST(Bounds, ExpectedBoundReference) {
  // mpmath: 20 sqrt(2000 ln 4e6) + 3 * 5 * 2000 / 4e6.
  EXPECT_NEAR(expected_bound(reference_inputs()), 3487.333687104861543, 1e-9);
}

TEST(Bounds, ExpectedBoundBudgetTerms) {
  BoundInputs in = reference_inputs();
  in.C = 10.0;
  in.delta = 0.005;
  const double expected = 20.0 * std::sqrt(2000.0 * std::log(200.0)) + 2.0 * 10.0 * 5.0 * 3.0 * 0.995 / 0.005 +
                          0.005 * 15.0 * 2000.0 + 20.0;
  EXPECT_NEAR(expected_bound(in), expected, 1e-9 * expected);
}

TEST(Bounds, MartingaleReference) {
  const MartingaleTerms m = martingale_terms(reference_inputs());
  EXPECT_EQ(m.S, 42.0);
  EXPECT_EQ(m.b, 15.0);
  EXPECT_EQ(m.V, 225.0 * 2000.0);
  EXPECT_NEAR(m.term, 240686.6290014836, 1e-6);
  EXPECT_NEAR(highprob_bound(reference_inputs()), 244173.9626885885, 1e-6);
}

TEST(Bounds, InputErrors) {
  BoundInputs in = reference_inputs();
  in.G = 0.1;
  in.D = 1.0;
  EXPECT_NO_THROW(expected_bound(in));
  EXPECT_THROW(highprob_bound(in), ConfigError);
  in = reference_inputs();
  in.gamma = 1.0;
  EXPECT_THROW(highprob_bound(in), ConfigError);
  in = reference_inputs();
  in.delta = 0.0;
  EXPECT_THROW(expected_bound(in), ConfigError);
}

TEST(Bounds, MonotoneInBudget) {
  BoundInputs in = reference_inputs();
  in.delta = 0.1;
  double prev = -1.0;
  for (double C : {0.0, 1.0, 10.0, 100.0}) {
    in.C = C;
    const double b = expected_bound(in);
    EXPECT_GT(b, prev);
    prev = b;
  }
}

TEST(DeltaPolicy, Examples) {
  EXPECT_DOUBLE_EQ(delta_policy(0.0, 2000).delta, 2.5e-7);
  EXPECT_DOUBLE_EQ(delta_policy(400.0, 2000).delta, 0.2);
  const DeltaChoice c = delta_policy(4010.0, 2000);
  EXPECT_EQ(c.delta, 2.0 / 3.0);
  EXPECT_TRUE(c.clamped);
  EXPECT_TRUE(c.warning.has_value());
  EXPECT_THROW(delta_policy(-1.0, 10), ConfigError);
}

TEST(Comparator, Examples) {
  Vector s(2);
  s << 3.0, 4.0;
  const Vector b = linear_comparator(Domain::ball(2, 5.0), s);
  EXPECT_NEAR(b[0], -3.0, 1e-15);
  EXPECT_NEAR(b[1], -4.0, 1e-15);
  Vector h(2);
  h << 1.0, 2.0;
  s << -1.0, 0.5;
  const Vector c = linear_comparator(Domain::box(h), s);
  EXPECT_EQ(c[0], 1.0);
  EXPECT_EQ(c[1], -2.0);
  EXPECT_TRUE(linear_comparator(Domain::ball(2, 1.0), Vector::Zero(2)).isZero(0.0));
}

TEST(ComputeRegret, UnperturbedTracksAddUp) {
  const Domain K = Domain::ball(5, 5.0);
  RngStream rng(21);
  auto seq = std::make_shared<const LinearLossSequence>(gen_linear_sequence(rng, 500, 5, 3.0));
  LossOracle oracle(seq, PerturbationSchedule{}, K);
  const auto records = run_episode(make_learner_config(K, 500, 1.0 / 250000.0), oracle, rng);
  const Vector cmp = linear_comparator(K, theta_sum(*seq, 500));
  const RegretReport rep = compute_regret(records, *seq, cmp);
  ASSERT_EQ(rep.regret.size(), 500u);
  EXPECT_NEAR(rep.final_regret(), rep.linear_regret.back(), 1e-9);
  EXPECT_EQ(rep.budget_used, 0.0);
  EXPECT_TRUE(std::all_of(rep.error_track.begin(), rep.error_track.end(), [](double e) { return e == 0.0; }));
  // The comparator minimizes the linear loss, so regret against any other fixed point is no larger.
  for (int trial = 0; trial < 20; ++trial) {
    const Vector other = sample_uniform_in(K, rng);
    EXPECT_LE(compute_regret(records, *seq, other).final_regret(), rep.final_regret() + 1e-9);
  }
}

TEST(ComputeRegret, CorrectedIntervalAndSigmaShare) {
  const auto iv = corrected_regret_interval(10.0, 3.0);
  EXPECT_EQ(iv.lower, 4.0);
  EXPECT_EQ(iv.upper, 16.0);

  const Domain K = Domain::ball(2, 1.0);
  RngStream rng(5);
  auto seq = std::make_shared<const LinearLossSequence>(gen_linear_sequence(rng, 10, 2, 1.0));
  LossOracle oracle(seq, PerturbationSchedule{}, K);
  const auto records = run_episode(make_learner_config(K, 10, 0.1), oracle, rng);
  const Vector cmp = Vector::Zero(2);
  EXPECT_NEAR(compute_regret(records, *seq, cmp, 2.0).final_regret(),
              compute_regret(records, *seq, cmp).final_regret() - 2.0, 1e-12);
}

}  // namespace
}  // namespace scrible
