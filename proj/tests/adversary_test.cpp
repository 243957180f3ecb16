#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include <gtest/gtest.h>

#include "scrible/adversary.hpp"
#include "scrible/learner.hpp"

namespace scrible {
namespace {

TEST(LinearSequence, NormsWithinG) {
  RngStream rng(5);
  const LinearLossSequence seq = gen_linear_sequence(rng, 5000, 4, 3.0);
  EXPECT_EQ(seq.horizon(), 5000);
  EXPECT_EQ(seq.dim(), 4);
  double mean = 0.0;
  for (int t = 1; t <= seq.horizon(); ++t) {
    EXPECT_LE(seq.theta(t).norm(), 3.0 + 1e-12);
    mean += seq.theta(t).norm() / 5000.0;
  }
  EXPECT_NEAR(mean, 1.5, 0.05);
  EXPECT_THROW(gen_linear_sequence(rng, 0, 4, 1.0), ConfigError);
  EXPECT_THROW(gen_linear_sequence(rng, 5, 4, -1.0), ConfigError);
}

TEST(Regime, Checks) {
  EXPECT_FALSE(check_regime(1000.0, 2000, false).has_value());
  EXPECT_THROW(check_regime(4010.0, 2000, false), ConfigError);
  const auto w = check_regime(4010.0, 2000, true);
  ASSERT_TRUE(w.has_value());
  EXPECT_NE(w->find("2.005"), std::string::npos);
}

TEST(BudgetAccountant, ClipsAtBudget) {
  BudgetAccountant acc(1.0);
  EXPECT_EQ(acc.charge(0.6), 0.6);
  EXPECT_EQ(acc.charge(-0.3), -0.3);
  EXPECT_NEAR(acc.charge(0.5), 0.1, 1e-15);
  EXPECT_EQ(acc.used(), 1.0);
  EXPECT_EQ(acc.clip_count(), 1);
  EXPECT_EQ(acc.charge(2.0), 0.0);
  EXPECT_EQ(acc.used(), 1.0);
  EXPECT_THROW(BudgetAccountant(-1.0), ConfigError);
}

TEST(BudgetAccountant, NeverExceedsBudgetUnderRandomCharges) {
  RngStream rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const double C = rng.uniform(0.0, 10.0);
    BudgetAccountant acc(C);
    double total = 0.0;
    for (int i = 0; i < 500; ++i) total += std::abs(acc.charge(rng.uniform(-1.0, 1.0)));
    EXPECT_LE(total, C * (1.0 + 1e-12));
    EXPECT_LE(acc.used(), C);
  }
}

Sinusoidal sinusoid(int d, double eps, double offset) {
  Sinusoidal s;
  s.epsilon = eps;
  s.direction = Vector::Zero(d);
  s.direction[0] = 1.0;
  s.offset = offset;
  return s;
}

TEST(Perturbation, SinusoidalValues) {
  const Domain K = Domain::ball(2, 5.0);
  PerturbationSchedule sch{sinusoid(2, 0.1, 2.0), 100.0, std::nullopt};
  Vector y(2);
  y << 0.5, 0.0;
  EXPECT_NEAR(raw_perturbation(sch, K, y, 1), 0.1, 1e-15);
  y << 4.9, 0.0;  // gauge 0.98 pays the offset
  EXPECT_NEAR(raw_perturbation(sch, K, y, 1), 0.1 * std::sin(4.9 * std::numbers::pi) + 2.0, 1e-14);
  y << 4.7, 0.0;  // gauge 0.94 does not
  EXPECT_NEAR(raw_perturbation(sch, K, y, 1), 0.1 * std::sin(4.7 * std::numbers::pi), 1e-14);
  EXPECT_EQ(sch.effective_cap(), 3.0);
}

TEST(Perturbation, CapAppliedBeforeBudget) {
  const Domain K = Domain::ball(1, 1.0);
  PerturbationSchedule sch{SpikeList{{{1, 5.0}, {2, -0.5}}}, 10.0, 1.0};
  BudgetAccountant acc(sch.budget);
  int caps = 0;
  Vector y = Vector::Zero(1);
  EXPECT_EQ(evaluate_perturbation(sch, acc, K, y, 1, &caps), 1.0);
  EXPECT_EQ(evaluate_perturbation(sch, acc, K, y, 2, &caps), -0.5);
  EXPECT_EQ(evaluate_perturbation(sch, acc, K, y, 3, &caps), 0.0);
  EXPECT_EQ(caps, 1);
  EXPECT_EQ(acc.used(), 1.5);
}

TEST(LossOracle, SpikesBeyondBudgetAreClipped) {
  const Domain K = Domain::ball(2, 1.0);
  RngStream rng(3);
  auto seq = std::make_shared<const LinearLossSequence>(gen_linear_sequence(rng, 10, 2, 1.0));
  // Spikes sum to 1.5 C with C = 2.
  PerturbationSchedule sch{SpikeList{{{1, 1.0}, {3, -1.0}, {5, 1.0}}}, 2.0, std::numeric_limits<double>::infinity()};
  LossOracle oracle(seq, sch, K);
  double total = 0.0;
  for (int t = 1; t <= 10; ++t) total += std::abs(oracle.evaluate_loss(Vector::Zero(2), t).sigma);
  EXPECT_LE(total, 2.0 + 1e-12);
  EXPECT_EQ(oracle.accountant().clip_count(), 1);
}

TEST(LossOracle, RejectsPointsOutsideK) {
  const Domain K = Domain::ball(2, 1.0);
  RngStream rng(3);
  auto seq = std::make_shared<const LinearLossSequence>(gen_linear_sequence(rng, 3, 2, 1.0));
  LossOracle oracle(seq, PerturbationSchedule{}, K);
  Vector y(2);
  y << 1.1, 0.0;
  EXPECT_THROW(oracle.evaluate_loss(y, 1), DomainError);
  EXPECT_THROW(oracle.evaluate_loss(Vector::Zero(2), 4), ConfigError);
  const LossSample s = oracle.evaluate_loss(Vector::Zero(2), 1);
  EXPECT_EQ(s.value, 0.0);
}

TEST(LossOracle, LinearPartIsOblivious) {
  // theta_t is fixed before play: the same sequence replayed against two
  // different learners gives identical linear coefficients.
  const Domain K = Domain::ball(3, 5.0);
  RngStream gen(11);
  auto seq = std::make_shared<const LinearLossSequence>(gen_linear_sequence(gen, 300, 3, 3.0));
  PerturbationSchedule sch{sinusoid(3, 0.05, 2.0), 300 * 2.05, std::nullopt};
  LossOracle a(seq, sch, K), b(seq, sch, K);
  RngStream r1(1), r2(2);
  const auto ra = run_episode(make_learner_config(K, 300, 0.3), a, r1);
  const auto rb = run_episode(make_learner_config(K, 300, 0.0), b, r2);
  for (int t = 1; t <= 300; ++t) {
    const auto& A = ra[static_cast<std::size_t>(t - 1)];
    const auto& B = rb[static_cast<std::size_t>(t - 1)];
    EXPECT_NEAR(A.linear_loss, seq->theta(t).dot(A.y), 1e-12);
    EXPECT_NEAR(B.linear_loss, seq->theta(t).dot(B.y), 1e-12);
  }
}

TEST(BlackBox, ReturnsEpsilonAndGap) {
  const Domain K = Domain::ball(2, 1.0);
  BlackBoxAdversary adv(0.01, K, 5);
  EXPECT_EQ(adv.query(Vector::Zero(2)), 0.01);
  RngStream rng(1);
  const auto out = adv.finalize(Vector::Zero(2), rng);
  EXPECT_EQ(out.gap, 0.02);
  EXPECT_FALSE(BlackBoxAdversary::same_bits(out.z, Vector::Zero(2)));
  EXPECT_EQ(adv.value_at(out.z), -0.01);
  EXPECT_THROW(adv.query(Vector::Zero(2)), ProtocolError);
  EXPECT_THROW(adv.finalize(Vector::Zero(2), rng), ProtocolError);
  EXPECT_THROW(BlackBoxAdversary(0.0, K, 5), ConfigError);
}

TEST(BlackBox, FullEpisodeGap) {
  const Domain K = Domain::ball(3, 2.0);
  BlackBoxAdversary adv(0.01, K, 1000);
  RngStream rng(9);
  const auto records = run_episode(make_learner_config(K, 1000, 0.1), adv, rng);
  EXPECT_EQ(adv.queried().size(), 1000u);
  const auto out = adv.finalize(best_iterate(records), rng);
  EXPECT_EQ(out.gap, 0.02);
}

}  // namespace
}  // namespace scrible
