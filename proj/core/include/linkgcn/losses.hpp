#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace linkgcn {

/// Link-classification objectives over 1-hop logits.
///
/// Logits are an n x 2 matrix, column 0 the link logit z_P and column 1 the
/// no-link logit z_N. Labels are 1 for a positive (same identity) link.
enum class LossKind { CrossEntropy, ClassBalance, Focal };

std::string_view to_string(LossKind kind);
LossKind parse_loss(std::string_view name);

struct LossConfig {
  LossKind kind = LossKind::CrossEntropy;
  double focal_alpha_pos = 0.5;  // alpha_N = 1 - alpha_P
  double focal_gamma = 2.0;

  void validate() const;
};

struct LossResult {
  double value = 0.0;
  Eigen::MatrixXd grad;     // dL/dlogits, same shape as the logits
  bool degenerate = false;  // class-balance loss saw a single class
};

/// Mean two-class softmax cross-entropy.
LossResult ce_loss(const Eigen::MatrixXd& logits, std::span<const std::uint8_t> labels);

/// (mean CE over positives + mean CE over negatives) / 2. With one class
/// absent it reduces to the mean CE of the present class.
LossResult class_balance_loss(const Eigen::MatrixXd& logits, std::span<const std::uint8_t> labels);

/// Batch mean of -alpha_c (1 - p_c)^gamma log p_c, p_c the softmax
/// probability of the true class, clamped to [1e-12, 1 - 1e-12].
LossResult focal_loss(const Eigen::MatrixXd& logits, std::span<const std::uint8_t> labels,
                      const LossConfig& cfg);

LossResult compute_loss(const LossConfig& cfg, const Eigen::MatrixXd& logits,
                        std::span<const std::uint8_t> labels);

}  // namespace linkgcn
