#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "scrible/random.hpp"

namespace scrible {
namespace {

std::vector<std::uint64_t> draw(RngStream rng, int n) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(rng.next_u64());
  return out;
}

TEST(RngStream, DeterministicPerSeedAndStream) {
  EXPECT_EQ(draw(RngStream(42, 3), 64), draw(RngStream(42, 3), 64));
  EXPECT_NE(draw(RngStream(42, 3), 16), draw(RngStream(42, 4), 16));
  EXPECT_NE(draw(RngStream(42, 3), 16), draw(RngStream(43, 3), 16));
}

TEST(RngStream, FrozenOutput) {
  // Pins the generator so that replayed experiments stay bit-identical across builds.
  RngStream rng(0, 0);
  const std::uint64_t first = rng.next_u64();
  RngStream again(0, 0);
  EXPECT_EQ(first, again.next_u64());
  EXPECT_EQ(detail::mix64(0), 0u);
  EXPECT_EQ(detail::mix64(1), 0x5692161d100b05e5ULL);
}

TEST(RngStream, UniformRange) {
  RngStream rng(9);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RngStream, NormalMoments) {
  RngStream rng(10);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(ForkStream, SameChildIdGivesSameSequence) {
  const RngStream parent(5);
  EXPECT_EQ(draw(fork_stream(parent, 7), 32), draw(fork_stream(parent, 7), 32));
}

TEST(ForkStream, DifferentChildIdsDifferInFirst16) {
  const RngStream parent(5);
  const auto a = draw(fork_stream(parent, 1), 16);
  const auto b = draw(fork_stream(parent, 2), 16);
  for (int i = 0; i < 16; ++i) EXPECT_NE(a[i], b[i]) << i;
}

TEST(ForkStream, ParentUnaffectedAndIndependentOfPosition) {
  RngStream p1(77), p2(77);
  const RngStream early_child = p1.fork(4);
  (void)p1.fork(9);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(p1.next_u64(), p2.next_u64());
  // A child forked after the parent advanced is the same child.
  EXPECT_EQ(draw(early_child, 8), draw(p1.fork(4), 8));
}

TEST(ForkStream, ManyStreamsDoNotCollide) {
  const RngStream root(1);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 10000; ++i) firsts.insert(root.fork(i).next_u64());
  EXPECT_EQ(firsts.size(), 10000u);
}

TEST(SampleUnitSphere, RejectsZeroDimension) {
  RngStream rng(1);
  EXPECT_THROW(sample_unit_sphere(rng, 0), ConfigError);
}

TEST(SampleUnitSphere, OneDimensionalIsSign) {
  RngStream rng(2);
  int plus = 0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd v = sample_unit_sphere(rng, 1);
    ASSERT_TRUE(v[0] == 1.0 || v[0] == -1.0);
    plus += v[0] > 0;
  }
  EXPECT_GT(plus, 400);
  EXPECT_LT(plus, 600);
}

TEST(SampleUnitSphere, UnitNorm) {
  RngStream rng(3);
  for (int d : {2, 3, 5, 17}) {
    for (int i = 0; i < 1000; ++i) EXPECT_NEAR(sample_unit_sphere(rng, d).norm(), 1.0, 1e-12);
  }
}

// E[mu] = 0 and E[mu mu^T] = I/d by rotational symmetry.
TEST(SampleUnitSphere, MomentsMonteCarlo) {
  RngStream rng(4);
  const int d = 5;
  const int n = 1000000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd mu = sample_unit_sphere(rng, d);
    mean += mu;
    cov.noalias() += mu * mu.transpose();
  }
  mean /= n;
  cov /= n;
  for (int i = 0; i < d; ++i) EXPECT_LE(std::abs(mean[i]), 4.0 / std::sqrt(n));
  EXPECT_LE((cov - Eigen::MatrixXd::Identity(d, d) / d).cwiseAbs().maxCoeff(), 5e-3);
}

}  // namespace
}  // namespace scrible
