#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "linkgcn/error.hpp"
#include "linkgcn/losses.hpp"
#include "oracles.hpp"

using namespace linkgcn;

namespace {

using Labels = std::vector<std::uint8_t>;

Eigen::MatrixXd logits(std::initializer_list<std::pair<double, double>> rows) {
  Eigen::MatrixXd z(static_cast<Eigen::Index>(rows.size()), 2);
  Eigen::Index i = 0;
  for (const auto& [p, n] : rows) {
    z(i, 0) = p;
    z(i, 1) = n;
    ++i;
  }
  return z;
}

Eigen::VectorXd flat(const Eigen::MatrixXd& m) { return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size()); }

Eigen::MatrixXd unflat(const Eigen::VectorXd& v, Eigen::Index rows) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, 2);
}

// Reference CE per sample, straight from the softmax definition.
double ce_term(double zp, double zn, std::uint8_t y) {
  const double p = std::exp(zp) / (std::exp(zp) + std::exp(zn));
  return -std::log(y ? p : 1.0 - p);
}

void check_gradient(const LossConfig& cfg, const Eigen::MatrixXd& z, const Labels& y, double tol) {
  const LossResult r = compute_loss(cfg, z, y);
  const Eigen::VectorXd fd = oracle::gradient(
      [&](const Eigen::VectorXd& v) { return compute_loss(cfg, unflat(v, z.rows()), y).value; }, flat(z));
  EXPECT_LT(oracle::relative_error(flat(r.grad), fd), tol);
}

}  // namespace

TEST(CeLoss, EvenLogitsGiveLn2) {
  for (const std::uint8_t y : {0, 1}) {
    EXPECT_NEAR(ce_loss(logits({{0, 0}}), Labels{y}).value, std::numbers::ln2, 1e-15);
  }
}

TEST(CeLoss, ConfidentCorrectIsNearZero) {
  EXPECT_LT(ce_loss(logits({{20, -20}, {-20, 20}}), Labels{1, 0}).value, 1e-8);
}

TEST(CeLoss, MatchesDefinitionAndGradientAtOrigin) {
  Rng rng(1);
  const Eigen::MatrixXd z = fixtures::random_logits(9, rng);
  const Labels y = fixtures::random_labels(9, rng);
  double want = 0.0;
  for (Eigen::Index i = 0; i < 9; ++i) want += ce_term(z(i, 0), z(i, 1), y[static_cast<std::size_t>(i)]);
  EXPECT_NEAR(ce_loss(z, y).value, want / 9.0, 1e-12);
  // Single sample at (0, 0): |dL/dz| = 0.5 per component.
  const LossResult r = ce_loss(logits({{0, 0}}), Labels{1});
  EXPECT_NEAR(r.grad(0, 0), -0.5, 1e-15);
  EXPECT_NEAR(r.grad(0, 1), 0.5, 1e-15);
}

TEST(CeLoss, GradientMatchesFiniteDifferences) {
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 1 + rng.below(12);
    check_gradient({}, fixtures::random_logits(n, rng), fixtures::random_labels(n, rng), 1e-6);
  }
}

TEST(CeLoss, StableAtExtremeLogits) {
  const LossResult r = ce_loss(logits({{800, -800}, {-800, 800}}), Labels{0, 1});
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_NEAR(r.value, 1600.0, 1e-9);
  EXPECT_TRUE(r.grad.allFinite());
}

TEST(CeLoss, EmptyBatchThrows) {
  EXPECT_THROW(ce_loss(Eigen::MatrixXd(0, 2), Labels{}), Error);
  EXPECT_THROW(ce_loss(logits({{0, 0}}), Labels{1, 0}), Error);
}

TEST(ClassBalanceLoss, OneOfEachAtOriginIsLn2) {
  EXPECT_NEAR(class_balance_loss(logits({{0, 0}, {0, 0}}), Labels{1, 0}).value, std::numbers::ln2, 1e-15);
}

TEST(ClassBalanceLoss, AveragesPerClassMeans) {
  const Eigen::MatrixXd z = logits({{1, 0}, {2, -1}, {0.5, 0.3}, {-0.2, 0.4}});
  const Labels y{1, 1, 1, 0};
  const double pos = (ce_term(1, 0, 1) + ce_term(2, -1, 1) + ce_term(0.5, 0.3, 1)) / 3.0;
  const double neg = ce_term(-0.2, 0.4, 0);
  EXPECT_NEAR(class_balance_loss(z, y).value, 0.5 * (pos + neg), 1e-14);
}

TEST(ClassBalanceLoss, DuplicatingPositivesChangesNothing) {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng.below(10);
    const Eigen::MatrixXd z = fixtures::random_logits(n, rng);
    const Labels y = fixtures::random_labels(n, rng);
    Eigen::MatrixXd z2 = z;
    Labels y2 = y;
    for (std::size_t i = 0; i < n; ++i) {
      if (!y[i]) continue;
      z2.conservativeResize(z2.rows() + 1, 2);
      z2.row(z2.rows() - 1) = z.row(static_cast<Eigen::Index>(i));
      y2.push_back(1);
    }
    EXPECT_NEAR(class_balance_loss(z, y).value, class_balance_loss(z2, y2).value, 1e-12);
  }
}

TEST(ClassBalanceLoss, EqualCountsAndEqualTermsMatchCe) {
  const Eigen::MatrixXd z = logits({{0.7, -0.1}, {-0.1, 0.7}, {0.7, -0.1}, {-0.1, 0.7}});
  const Labels y{1, 0, 1, 0};
  EXPECT_EQ(class_balance_loss(z, y).value, ce_loss(z, y).value);
}

TEST(ClassBalanceLoss, SingleClassIsFlaggedAndReducesToCe) {
  const Eigen::MatrixXd z = logits({{0.3, 0.1}, {1.0, -2.0}});
  const LossResult r = class_balance_loss(z, Labels{1, 1});
  EXPECT_TRUE(r.degenerate);
  EXPECT_NEAR(r.value, ce_loss(z, Labels{1, 1}).value, 1e-15);
  EXPECT_FALSE(class_balance_loss(z, Labels{1, 0}).degenerate);
}

TEST(ClassBalanceLoss, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  const LossConfig cfg{LossKind::ClassBalance};
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 1 + rng.below(12);
    check_gradient(cfg, fixtures::random_logits(n, rng), fixtures::random_labels(n, rng), 1e-6);
  }
}

TEST(FocalLoss, ReducesToHalfCe) {
  Rng rng(5);
  const LossConfig cfg{LossKind::Focal, 0.5, 0.0};
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.below(16);
    const Eigen::MatrixXd z = fixtures::random_logits(n, rng);
    const Labels y = fixtures::random_labels(n, rng);
    EXPECT_NEAR(focal_loss(z, y, cfg).value, 0.5 * ce_loss(z, y).value, 1e-12);
  }
}

TEST(FocalLoss, HandValueAtEvenOdds) {
  const LossConfig cfg{LossKind::Focal, 0.5, 2.0};
  const double got = focal_loss(logits({{0, 0}}), Labels{1}, cfg).value;
  EXPECT_NEAR(got, 0.5 * 0.25 * std::numbers::ln2, 1e-15);
  EXPECT_NEAR(got, 0.08664, 1e-5);
}

TEST(FocalLoss, CertainTrueClassContributesNothing) {
  const LossConfig cfg{LossKind::Focal, 0.5, 2.0};
  EXPECT_LT(focal_loss(logits({{40, -40}}), Labels{1}, cfg).value, 1e-20);
  EXPECT_GE(focal_loss(logits({{40, -40}}), Labels{1}, cfg).value, 0.0);
}

TEST(FocalLoss, AlphaWeightsTheClasses) {
  const LossConfig cfg{LossKind::Focal, 0.25, 2.0};
  const double pos = focal_loss(logits({{0, 0}}), Labels{1}, cfg).value;
  const double neg = focal_loss(logits({{0, 0}}), Labels{0}, cfg).value;
  EXPECT_NEAR(neg / pos, 3.0, 1e-12);
}

TEST(FocalLoss, DecreasesAsTheTrueClassGetsLikelier) {
  const LossConfig cfg{LossKind::Focal, 0.5, 2.0};
  double prev = std::numeric_limits<double>::infinity();
  for (double m = -6.0; m <= 6.0; m += 0.25) {
    const double v = focal_loss(logits({{m, 0}}), Labels{1}, cfg).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(FocalLoss, GradientMatchesFiniteDifferences) {
  Rng rng(6);
  for (int i = 0; i < 20; ++i) {
    const LossConfig cfg{LossKind::Focal, rng.uniform(0.1, 0.9), rng.uniform(0.0, 4.0)};
    const std::size_t n = 1 + rng.below(12);
    // Larger gamma means larger third derivatives, so central differences lose a digit.
    check_gradient(cfg, fixtures::random_logits(n, rng), fixtures::random_labels(n, rng), 1e-5);
  }
}

TEST(Losses, AllNonNegative) {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.below(8);
    const Eigen::MatrixXd z = fixtures::random_logits(n, rng, 10.0);
    const Labels y = fixtures::random_labels(n, rng);
    for (const auto kind : {LossKind::CrossEntropy, LossKind::ClassBalance, LossKind::Focal}) {
      EXPECT_GE(compute_loss({kind}, z, y).value, 0.0);
    }
  }
}

TEST(Losses, ConfigValidationAndNames) {
  EXPECT_THROW((LossConfig{LossKind::Focal, 0.0, 2.0}.validate()), ConfigError);
  EXPECT_THROW((LossConfig{LossKind::Focal, 1.0, 2.0}.validate()), ConfigError);
  EXPECT_THROW((LossConfig{LossKind::Focal, 0.5, -1.0}.validate()), ConfigError);
  for (const auto k : {LossKind::CrossEntropy, LossKind::ClassBalance, LossKind::Focal}) {
    EXPECT_EQ(parse_loss(to_string(k)), k);
  }
  EXPECT_THROW(parse_loss("mse"), ConfigError);
}
