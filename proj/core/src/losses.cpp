#include "linkgcn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "linkgcn/error.hpp"

namespace linkgcn {

namespace {

constexpr double kProbFloor = 1e-12;

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// Margin of the true class over the other one: t = z_true - z_other.
double true_margin(const Eigen::MatrixXd& logits, Eigen::Index i, bool positive) {
  const double diff = logits(i, 0) - logits(i, 1);
  return positive ? diff : -diff;
}

// Per-sample CE value and dCE/dt where t is the true-class margin.
struct SampleCe {
  double value;
  double dmargin;
};

SampleCe sample_ce(double t) {
  // p = sigmoid(t); CE = -log p = softplus(-t); dCE/dt = p - 1.
  const double p = 1.0 / (1.0 + std::exp(-t));
  return {softplus(-t), p - 1.0};
}

void scatter(Eigen::MatrixXd& grad, Eigen::Index i, bool positive, double dmargin) {
  grad(i, 0) = positive ? dmargin : -dmargin;
  grad(i, 1) = -grad(i, 0);
}

void check_batch(const Eigen::MatrixXd& logits, std::span<const std::uint8_t> labels) {
  if (logits.cols() != 2) throw ConfigError("logits must have two columns (z_P, z_N)");
  if (static_cast<std::size_t>(logits.rows()) != labels.size()) {
    throw ConfigError("logit rows and label count differ");
  }
  if (labels.empty()) throw ConfigError("loss over an empty batch");
}

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::CrossEntropy:
      return "ce";
    case LossKind::ClassBalance:
      return "cb";
    case LossKind::Focal:
      return "focal";
  }
  return "unknown";
}

LossKind parse_loss(std::string_view name) {
  if (name == "ce") return LossKind::CrossEntropy;
  if (name == "cb" || name == "class_balance") return LossKind::ClassBalance;
  if (name == "focal" || name == "fl") return LossKind::Focal;
  throw ConfigError("unknown loss '" + std::string(name) + "'");
}

void LossConfig::validate() const {
  if (!(focal_alpha_pos > 0.0 && focal_alpha_pos < 1.0)) {
    throw ConfigError("focal alpha_P must lie in (0, 1)");
  }
  if (!std::isfinite(focal_gamma) || focal_gamma < 0.0) throw ConfigError("focal gamma must be >= 0");
}

LossResult ce_loss(const Eigen::MatrixXd& logits, std::span<const std::uint8_t> labels) {
  check_batch(logits, labels);
  const auto n = logits.rows();
  LossResult out;
  out.grad.resize(n, 2);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool pos = labels[static_cast<std::size_t>(i)] != 0;
    const SampleCe s = sample_ce(true_margin(logits, i, pos));
    out.value += s.value;
    scatter(out.grad, i, pos, s.dmargin * inv_n);
  }
  out.value *= inv_n;
  return out;
}

LossResult class_balance_loss(const Eigen::MatrixXd& logits, std::span<const std::uint8_t> labels) {
  check_batch(logits, labels);
  const auto n = logits.rows();
  std::size_t n_pos = 0;
  for (const auto l : labels) n_pos += l != 0;
  const std::size_t n_neg = labels.size() - n_pos;

  LossResult out;
  out.grad.resize(n, 2);
  double sum_pos = 0.0;
  double sum_neg = 0.0;
  // Per-sample weights: alpha_c = 1/N_c, halved when both classes are present.
  const bool both = n_pos > 0 && n_neg > 0;
  out.degenerate = !both;
  const double half = both ? 0.5 : 1.0;
  const double w_pos = n_pos > 0 ? half / static_cast<double>(n_pos) : 0.0;
  const double w_neg = n_neg > 0 ? half / static_cast<double>(n_neg) : 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool pos = labels[static_cast<std::size_t>(i)] != 0;
    const SampleCe s = sample_ce(true_margin(logits, i, pos));
    (pos ? sum_pos : sum_neg) += s.value;
    scatter(out.grad, i, pos, s.dmargin * (pos ? w_pos : w_neg));
  }
  double value = 0.0;
  if (n_pos > 0) value += sum_pos / static_cast<double>(n_pos);
  if (n_neg > 0) value += sum_neg / static_cast<double>(n_neg);
  out.value = value * half;
  return out;
}

LossResult focal_loss(const Eigen::MatrixXd& logits, std::span<const std::uint8_t> labels,
                      const LossConfig& cfg) {
  check_batch(logits, labels);
  cfg.validate();
  const auto n = logits.rows();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double gamma = cfg.focal_gamma;
  LossResult out;
  out.grad.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool pos = labels[static_cast<std::size_t>(i)] != 0;
    const double alpha = pos ? cfg.focal_alpha_pos : 1.0 - cfg.focal_alpha_pos;
    const double t = true_margin(logits, i, pos);
    const double p_raw = 1.0 / (1.0 + std::exp(-t));
    const double p = std::clamp(p_raw, kProbFloor, 1.0 - kProbFloor);
    // log p from the stable form unless the clamp is active.
    const double log_p = (p == p_raw) ? -softplus(-t) : std::log(p);
    const double q = 1.0 - p;
    const double modulator = gamma == 0.0 ? 1.0 : std::pow(q, gamma);
    out.value += -alpha * modulator * log_p;
    // dL/dt = alpha [gamma p q^gamma log p - q^(gamma+1)], using dp/dt = p q.
    const double dmargin = alpha * (gamma * p * modulator * log_p - modulator * q);
    scatter(out.grad, i, pos, dmargin * inv_n);
  }
  out.value *= inv_n;
  return out;
}

LossResult compute_loss(const LossConfig& cfg, const Eigen::MatrixXd& logits,
                        std::span<const std::uint8_t> labels) {
  switch (cfg.kind) {
    case LossKind::CrossEntropy:
      return ce_loss(logits, labels);
    case LossKind::ClassBalance:
      return class_balance_loss(logits, labels);
    case LossKind::Focal:
      return focal_loss(logits, labels, cfg);
  }
  throw ConfigError("unknown loss kind");
}

}  // namespace linkgcn
