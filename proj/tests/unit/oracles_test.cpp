// The oracles are only useful if they are right on cases worked by hand.

#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace linkgcn;

TEST(OracleAp, HandCases) {
  EXPECT_DOUBLE_EQ(oracle::ap({0.9, 0.1}, {1, 0}), 1.0);
  EXPECT_NEAR(oracle::ap({0.9, 0.8, 0.7}, {1, 0, 1}), 0.8333333333333333, 1e-15);
  EXPECT_NEAR(oracle::ap({0.9, 0.8, 0.7, 0.6}, {0, 0, 0, 1}), 0.25, 1e-15);
}

TEST(OracleBCubed, HandCases) {
  const auto same = oracle::bcubed({0, 0, 1, 1}, {0, 0, 1, 1});
  EXPECT_DOUBLE_EQ(same.f, 1.0);
  const auto lump = oracle::bcubed({0, 0, 0, 0}, {0, 0, 1, 1});
  EXPECT_DOUBLE_EQ(lump.precision, 0.5);
  EXPECT_DOUBLE_EQ(lump.recall, 1.0);
  const auto split = oracle::bcubed({0, 1, 2, 3}, {0, 0, 1, 1});
  EXPECT_DOUBLE_EQ(split.precision, 1.0);
  EXPECT_DOUBLE_EQ(split.recall, 0.5);
  EXPECT_NEAR(split.f, 2.0 / 3.0, 1e-15);
}

TEST(OracleGradient, QuadraticIsExactToRounding) {
  Eigen::VectorXd x(3);
  x << 1.0, -2.0, 0.5;
  const auto g = oracle::gradient([](const Eigen::VectorXd& v) { return v.squaredNorm() + 3.0 * v[1]; }, x);
  EXPECT_NEAR(g[0], 2.0, 1e-9);
  EXPECT_NEAR(g[1], -1.0, 1e-9);
  EXPECT_NEAR(g[2], 1.0, 1e-9);
}

TEST(OracleGradient, SoftmaxCrossEntropyAtOrigin) {
  // -log softmax_0 at z = (0, 0): gradient (-0.5, 0.5).
  const auto ce = [](const Eigen::VectorXd& z) { return std::log(std::exp(z[0]) + std::exp(z[1])) - z[0]; };
  const auto g = oracle::gradient(ce, Eigen::VectorXd::Zero(2));
  EXPECT_NEAR(g[0], -0.5, 1e-10);
  EXPECT_NEAR(g[1], 0.5, 1e-10);
}

TEST(OracleGradient, ZeroFunction) {
  const auto g = oracle::gradient([](const Eigen::VectorXd&) { return 0.0; }, Eigen::VectorXd::Ones(4));
  EXPECT_TRUE(g.isZero());
}

TEST(OracleKnn, SortsByDistanceThenIndex) {
  const auto nn = oracle::knn({{0.0f}, {1.0f}, {-1.0f}, {3.0f}}, 0, 3);
  ASSERT_EQ(nn.size(), 3u);
  EXPECT_EQ(nn[0].index, 1u);
  EXPECT_EQ(nn[1].index, 2u);
  EXPECT_EQ(nn[2].index, 3u);
}

TEST(OracleComponents, HandCase) {
  const auto c = oracle::components(5, {{0, 1}, {3, 4}});
  EXPECT_TRUE(oracle::same_partition(c, {0, 0, 1, 2, 2}));
  EXPECT_FALSE(oracle::same_partition(c, {0, 0, 0, 2, 2}));
}
