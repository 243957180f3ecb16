#include <array>
#include <chrono>
#include <cmath>
#include <memory>
#include <vector>

#include <gtest/gtest.h>

#include "scrible/adversary.hpp"
#include "scrible/learner.hpp"
#include "scrible/oracles.hpp"
#include "test_support.hpp"

namespace scrible {
namespace {

Vector e1(int d) {
  Vector v = Vector::Zero(d);
  v[0] = 1.0;
  return v;
}

struct ConstantOracle {
  int T;
  double value;
  int horizon() const { return T; }
  LossSample evaluate_loss(const Vector&, int) const { return {value, value, 0.0}; }
};

LossOracle linear_oracle(RngStream& rng, const Domain& K, int T, double G) {
  auto seq = std::make_shared<const LinearLossSequence>(gen_linear_sequence(rng, T, K.dim(), G));
  return LossOracle(seq, PerturbationSchedule{}, K);
}

TEST(EtaPresets, Formulas) {
  const double T = 2000, d = 5, delta = 1.0 / (T * T);
  EXPECT_NEAR(preset_learning_rate(EtaPreset::kTheorem1, 1.0, 5, 2000, delta),
              std::sqrt(std::log(1.0 / delta)) / (2 * d * std::sqrt(T)), 1e-16);
  EXPECT_NEAR(preset_learning_rate(EtaPreset::kPaperSec7, 1.0, 5, 2000, delta),
              std::sqrt(std::log(1.0 / delta)) / (4 * d * std::sqrt(T)), 1e-16);
  EXPECT_NEAR(preset_learning_rate(EtaPreset::kTheorem2Proof, 1.0, 5, 2000, delta),
              std::sqrt(std::log(T)) / (2 * d * std::sqrt(T)), 1e-16);
  // mpmath: sqrt(ln(4e6)) / (10 sqrt(2000)).
  EXPECT_NEAR(preset_learning_rate(EtaPreset::kTheorem1, 1.0, 5, 2000, delta), 0.0087183154677621539, 1e-17);
  // The delta = 0 baseline evaluates the formula at 1/T^2.
  EXPECT_EQ(preset_learning_rate(EtaPreset::kTheorem1, 1.0, 5, 2000, 0.0),
            preset_learning_rate(EtaPreset::kTheorem1, 1.0, 5, 2000, delta));
}

TEST(LearnerConfig, Validation) {
  const Domain K = Domain::ball(2, 5.0);
  EXPECT_THROW(make_learner_config(K, 0, 0.1), ConfigError);
  EXPECT_THROW(make_learner_config(K, 10, 0.7), ConfigError);
  LearnerConfig cfg = make_learner_config(K, 10, 0.1);
  cfg.eta = -1.0;
  EXPECT_THROW(ScribleLearner{cfg}, ConfigError);
}

TEST(InitLearner, StartsAtCenter) {
  for (double delta : {0.0, 0.1, 2.0 / 3.0}) {
    for (const Domain& K : {Domain::ball(5, 5.0), Domain::cube(4, 2.0)}) {
      const ScribleLearner L = init_learner(make_learner_config(K, 10, delta));
      EXPECT_TRUE(L.state().x.isZero(0.0));
      EXPECT_TRUE(L.state().grad_sum.isZero(0.0));
      EXPECT_EQ(L.state().t, 1);
      const Matrix expected = hessian_inverse_sqrt(Barrier(K).hessian(Vector::Zero(K.dim()))).inv_sqrt;
      EXPECT_TRUE(L.state().hess_factor.inv_sqrt.isApprox(expected, 1e-15));
    }
  }
}

TEST(ProposeAction, CenterOfBallRadiusFive) {
  ScribleLearner L(make_learner_config(Domain::ball(5, 5.0), 1, 0.0));
  RngStream rng(1);
  // A = (2/25)^{-1/2} I, so every y has norm sqrt(25/2).
  const Proposal p = L.propose_action(rng);
  EXPECT_NEAR(p.y.norm(), std::sqrt(12.5), 1e-12);
  EXPECT_NEAR(p.mu.norm(), 1.0, 1e-12);
}

TEST(ProposeAction, IdentityFactorFixture) {
  // Box halfwidth sqrt(2): Hessian at the center is exactly I.
  ScribleLearner L(make_learner_config(Domain::cube(3, std::sqrt(2.0)), 1, 0.0));
  EXPECT_TRUE(L.state().hess_factor.inv_sqrt.isApprox(Matrix::Identity(3, 3), 1e-15));
  const Proposal p = L.propose_with(e1(3));
  EXPECT_TRUE(p.y.isApprox(e1(3), 1e-15));
}

TEST(ProposeAction, BoxProposalsStayInside) {
  const Domain K = Domain::box(Vector::LinSpaced(3, 1.0, 2.0));
  RngStream rng(8);
  LossOracle oracle = linear_oracle(rng, K, 100000, 1.0);
  LearnerConfig cfg = make_learner_config(K, 100000, 0.0);
  cfg.eta *= 20.0;  // push iterates toward the boundary
  const auto records = run_episode(cfg, oracle, rng);
  int outside = 0;
  for (const RoundRecord& r : records) outside += !K.contains(r.y, 1e-12);
  EXPECT_EQ(outside, 0);
  EXPECT_EQ(records.size(), 100000u);
}

TEST(BuildEstimator, Examples) {
  ScribleLearner L(make_learner_config(Domain::cube(2, std::sqrt(2.0)), 2, 0.0));
  L.propose_with(e1(2));
  const Estimate e = L.build_estimator(1.0);
  EXPECT_TRUE(e.g.isApprox(2.0 * e1(2), 1e-15));
  EXPECT_NEAR(e.dual_norm, 2.0, 1e-14);
  L.ftrl_update(e.g);

  L.propose_with(e1(2));
  EXPECT_TRUE(L.build_estimator(0.0).g.isZero(0.0));
}

TEST(BuildEstimator, DualNormIdentityAcrossStates) {
  const Domain K = Domain::ball(5, 5.0);
  RngStream rng(12);
  LossOracle oracle = linear_oracle(rng, K, 3000, 3.0);
  const auto records = run_episode(make_learner_config(K, 3000, 0.0), oracle, rng);
  for (const RoundRecord& r : records) {
    const double expected = 5.0 * std::abs(r.loss);
    EXPECT_NEAR(r.estimator_dual_norm, expected, 1e-9 * std::max(1.0, expected));
  }
}

TEST(Protocol, RejectsOutOfOrderCalls) {
  ScribleLearner L(make_learner_config(Domain::ball(2, 5.0), 5, 0.1));
  RngStream rng(2);
  EXPECT_THROW(L.build_estimator(1.0), ProtocolError);
  EXPECT_THROW(L.ftrl_update(Vector::Zero(2)), ProtocolError);
  L.propose_action(rng);
  EXPECT_THROW(L.propose_action(rng), ProtocolError);
  EXPECT_THROW(L.ftrl_update(Vector::Zero(2)), ProtocolError);
  const Estimate e = L.build_estimator(0.5);
  EXPECT_THROW(L.build_estimator(0.5), ProtocolError);
  L.ftrl_update(e.g);
  EXPECT_NO_THROW(L.propose_action(rng));
}

TEST(FtrlUpdate, ZeroSumGivesCenter) {
  for (const Domain& K : {Domain::ball(3, 5.0), Domain::cube(3, 1.0)}) {
    for (double delta : {0.0, 0.3}) {
      const FtrlSolution s = solve_ftrl(Barrier(K), Vector::Zero(3), delta);
      EXPECT_TRUE(s.x.isZero(0.0));
    }
  }
}

TEST(FtrlUpdate, BallUnitRadiusClosedForm) {
  // Stationarity c + 2u/(1-u^2) = 0 with c = 1 gives u = -(sqrt 2 - 1).
  const Barrier b(Domain::ball(2, 1.0));
  const FtrlSolution s = solve_ftrl(b, e1(2), 0.0);
  EXPECT_NEAR(s.x[0], -(std::sqrt(2.0) - 1.0), 1e-12);
  EXPECT_EQ(s.x[1], 0.0);
  EXPECT_FALSE(s.constrained);
  EXPECT_NEAR((s.x - oracle::ftrl_bisection(b.domain(), e1(2), 0.0)).norm(), 0.0, 1e-12);
  // First-order optimality in R^d.
  EXPECT_LE((e1(2) + b.gradient(s.x)).norm(), 1e-9);
}

TEST(FtrlUpdate, BallShrunkActiveConstraint) {
  const Barrier b(Domain::ball(2, 1.0));
  const FtrlSolution s = solve_ftrl(b, 100.0 * e1(2), 0.5);
  EXPECT_LE(s.x.norm(), 0.5);
  EXPECT_NEAR(s.x[0], -0.5, 1e-15);
  EXPECT_EQ(s.x[1], 0.0);
  EXPECT_TRUE(s.constrained);
  // The unconstrained radius (-1 + sqrt(1 + c^2)) / c exceeds 0.5, so the multiplier is non-negative.
  EXPECT_GT((-1.0 + std::sqrt(1.0 + 1e4)) / 100.0, 0.5);
  EXPECT_NEAR((s.x - oracle::ftrl_bisection(b.domain(), 100.0 * e1(2), 0.5)).norm(), 0.0, 1e-12);
}

TEST(FtrlUpdate, BoxClosedForm) {
  // Per coordinate: c x^2 - 2x - c h^2 = 0, x = (1 - sqrt(1 + c^2 h^2)) / c.
  const Vector h = Vector::LinSpaced(4, 1.0, 2.5);
  const Barrier b(Domain::box(h));
  Vector c(4);
  c << 0.3, -2.0, 7.5, -0.01;
  const FtrlSolution s = solve_ftrl(b, c, 0.0);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.x[i], (1.0 - std::sqrt(1.0 + c[i] * c[i] * h[i] * h[i])) / c[i], 1e-12);
}

TEST(FtrlUpdate, AgreesWithBisectionOracle) {
  RngStream rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int d = 1 + static_cast<int>(rng.uniform() * 6);
    const Domain K = i % 2 == 0 ? Domain::ball(d, rng.uniform(1.0, 6.0))
                                : Domain::box((Vector::Random(d).array().abs() * 4.0 + 1.0).matrix());
    const double delta = std::array<double, 3>{0.0, 0.2, 0.5}[static_cast<std::size_t>(i % 3)];
    const Vector dir = sample_unit_sphere(rng, d);
    const Vector linear = std::pow(10.0, rng.uniform(-3.0, 3.0)) * dir;
    const Vector x = solve_ftrl(Barrier(K), linear, delta).x;
    worst = std::max(worst, (x - oracle::ftrl_bisection(K, linear, delta)).norm());
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(FtrlUpdate, DampedNewtonMatchesStructuredSolverInside) {
  RngStream rng(99);
  for (int i = 0; i < 200; ++i) {
    const Domain K = i % 2 ? Domain::ball(4, 3.0) : Domain::cube(4, 2.0);
    const Barrier b(K);
    const Vector linear = rng.uniform(0.0, 2.0) * sample_unit_sphere(rng, 4);
    const FtrlSolution fast = solve_ftrl(b, linear, 0.0);
    const FtrlSolution generic = solve_ftrl_damped_newton(b, linear, 0.0);
    EXPECT_LE((fast.x - generic.x).norm(), 1e-8);
  }
}

TEST(FtrlUpdate, DampedNewtonReportsActiveConstraint) {
  const Barrier b(Domain::ball(2, 1.0));
  EXPECT_THROW(solve_ftrl_damped_newton(b, 100.0 * e1(2), 0.5), SolverError);
}

TEST(FtrlUpdate, SolverIterationCap) {
  const Barrier b(Domain::ball(2, 1.0));
  EXPECT_THROW(solve_ftrl(b, 0.7 * e1(2), 0.0, 1e-300, 1), SolverError);
}

TEST(RunEpisode, SingleRound) {
  const Domain K = Domain::ball(5, 5.0);
  RngStream rng(4);
  LossOracle oracle = linear_oracle(rng, K, 1, 3.0);
  const auto records = run_episode(make_learner_config(K, 1, 0.1), oracle, rng);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_TRUE(records[0].x.isZero(0.0));
}

TEST(RunEpisode, ZeroLossKeepsCenter) {
  ConstantOracle zero{200, 0.0};
  RngStream rng(6);
  const auto records = run_episode(make_learner_config(Domain::cube(3, 1.0), 200, 0.2), zero, rng);
  for (const RoundRecord& r : records) {
    EXPECT_TRUE(r.x.isZero(0.0));
    EXPECT_TRUE(r.g.isZero(0.0));
  }
}

TEST(RunEpisode, OracleHorizonTooShort) {
  ConstantOracle short_oracle{5, 0.0};
  RngStream rng(6);
  EXPECT_THROW(run_episode(make_learner_config(Domain::cube(3, 1.0), 10, 0.2), short_oracle, rng), ConfigError);
}

TEST(RunEpisode, FullSizeEpisodeIsFast) {
  const Domain K = Domain::ball(5, 5.0);
  RngStream rng(7);
  LossOracle oracle = linear_oracle(rng, K, 2000, 3.0);
  const auto start = std::chrono::steady_clock::now();
  const auto records = run_episode(make_learner_config(K, 2000, 1.0 / 4e6, EtaPreset::kPaperSec7), oracle, rng);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(records.size(), 2000u);
  EXPECT_LT(seconds, 2.0);
}

TEST(RunEpisode, IteratesStayInShrunkSet) {
  const Domain K = Domain::ball(3, 2.0);
  RngStream rng(17);
  LossOracle oracle = linear_oracle(rng, K, 3000, 2.0);
  LearnerConfig cfg = make_learner_config(K, 3000, 0.5);
  cfg.eta *= 50.0;
  const auto records = run_episode(cfg, oracle, rng);
  for (const RoundRecord& r : records) EXPECT_LE(K.gauge(r.x), 0.5 + 1e-12);
}

TEST(RunEpisode, StepBoundWhenLossesAreSmall) {
  // |f_t| <= G * radius = 0.1, so the step guarantee must hold in every round.
  const Domain K = Domain::ball(5, 1.0);
  RngStream rng(19);
  LossOracle oracle = linear_oracle(rng, K, 2000, 0.1);
  LearnerConfig cfg = make_learner_config(K, 2000, 1.0 / 4e6);
  cfg.verify_lemma4 = true;
  const auto records = run_episode(cfg, oracle, rng);
  const double bound = 4.0 * 5.0 * cfg.eta;
  for (const RoundRecord& r : records) EXPECT_LT(r.step_local_norm, bound);
}

TEST(BestIterate, Examples) {
  auto rec = [](int t, double loss) {
    RoundRecord r{};
    r.t = t;
    r.loss = loss;
    r.y = Vector::Constant(2, static_cast<double>(t));
    return r;
  };
  EXPECT_EQ(best_iterate({rec(1, 5.0)})[0], 1.0);
  EXPECT_EQ(best_iterate({rec(1, 3.0), rec(2, 1.0), rec(3, 2.0)})[0], 2.0);
  EXPECT_EQ(best_iterate({rec(1, 2.0), rec(2, 1.0), rec(3, 1.0)})[0], 2.0);
  EXPECT_THROW(best_iterate({}), ConfigError);
}

}  // namespace
}  // namespace scrible
