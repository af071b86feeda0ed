#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "linkgcn/subgraph.hpp"

namespace linkgcn {

struct GcnArchitecture {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden{64, 64};
  double leaky_slope = 0.01;

  void validate() const;
  std::size_t layer_count() const { return hidden.size(); }
  std::size_t layer_input(std::size_t l) const { return l == 0 ? input_dim : hidden[l - 1]; }
  std::size_t parameter_count() const;
  std::uint64_t hash() const;

  friend bool operator==(const GcnArchitecture&, const GcnArchitecture&) = default;
};

/// All trainable parameters in one contiguous vector.
///
/// Layer l owns a (2*d_l) x d_{l+1} weight (column-major) followed by a d_{l+1}
/// bias; the classifier head owns a d_L x 2 weight and a 2-bias mapping the
/// final node embedding to the logits (z_P, z_N). Gradients use the same type
/// and layout.
///
/// Every non-const accessor bumps a revision counter; a forward trace taken
/// before a mutation is rejected by backward().
class GcnParams {
 public:
  explicit GcnParams(GcnArchitecture arch);
  GcnParams(const GcnParams& other);
  GcnParams& operator=(const GcnParams& other);
  GcnParams(GcnParams&&) noexcept = default;
  GcnParams& operator=(GcnParams&&) noexcept = default;

  const GcnArchitecture& architecture() const { return arch_; }
  std::size_t layer_count() const { return arch_.layer_count(); }

  Eigen::Map<const Eigen::MatrixXd> layer_weight(std::size_t l) const;
  Eigen::Map<const Eigen::VectorXd> layer_bias(std::size_t l) const;
  Eigen::Map<const Eigen::MatrixXd> head_weight() const;
  Eigen::Map<const Eigen::VectorXd> head_bias() const;

  Eigen::Map<Eigen::MatrixXd> layer_weight(std::size_t l);
  Eigen::Map<Eigen::VectorXd> layer_bias(std::size_t l);
  Eigen::Map<Eigen::MatrixXd> head_weight();
  Eigen::Map<Eigen::VectorXd> head_bias();

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() {
    ++revision_;
    return values_;
  }

  std::uint64_t instance() const { return instance_; }
  std::uint64_t revision() const { return revision_; }

 private:
  struct Block {
    std::size_t weight_offset, rows, cols, bias_offset;
  };

  GcnArchitecture arch_;
  Eigen::VectorXd values_;
  std::vector<Block> blocks_;  // layers..., head
  std::uint64_t instance_;
  std::uint64_t revision_ = 0;
};

using GcnGradients = GcnParams;

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
GcnParams init_params(std::size_t input_dim, std::vector<std::size_t> hidden, std::uint64_t seed,
                      double leaky_slope = 0.01);

/// Cached activations of one forward pass.
struct ForwardTrace {
  Eigen::MatrixXd adjacency;
  std::vector<Eigen::MatrixXd> concat;   // [H_l | A' H_l] per layer
  std::vector<Eigen::MatrixXd> preact;   // pre-activation per layer
  Eigen::MatrixXd embedding;             // final H_L
  Eigen::MatrixXd logits;                // one row per 1-hop node: (z_P, z_N)
  std::size_t one_hop_count = 0;
  std::uint64_t params_instance = 0;
  std::uint64_t params_revision = 0;
  bool consumed = false;
};

/// H_{l+1} = leaky([H_l | A' H_l] W_l + b_l), H_0 = X'; head on 1-hop rows.
ForwardTrace forward(const Subgraph& sg, const GcnParams& params);

/// Link probability softmax(z)_P = 1 / (1 + exp(z_N - z_P)).
double link_probability(double z_pos, double z_neg);

/// Reverse-mode gradients of a scalar loss given dL/dlogits
/// (one_hop_count x 2). Consumes the trace.
GcnGradients backward(ForwardTrace& trace, const GcnParams& params,
                      const Eigen::MatrixXd& logit_grad);

// Checkpoints ---------------------------------------------------------------

struct Checkpoint {
  GcnParams params;
  std::uint64_t config_hash = 0;
};

/// "LGCK" | u32 version | u64 config hash | u64 input dim | u32 layers |
/// u64 hidden[layers] | f64 leaky slope | u64 parameter count | f64 payload.
/// All little-endian.
void save_checkpoint(const GcnParams& params, const std::filesystem::path& path,
                     std::uint64_t config_hash = 0);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws ShapeError naming layer 0 when `dim` does not match the model input.
void check_input_dim(const GcnParams& params, std::size_t dim);

}  // namespace linkgcn
