#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "linkgcn/embedding.hpp"
#include "linkgcn/error.hpp"
#include "linkgcn/gcn.hpp"
#include "linkgcn/losses.hpp"
#include "linkgcn/sampling.hpp"

namespace linkgcn {

struct TrainConfig {
  SamplingStrategy strategy;
  LossConfig loss;
  std::size_t epochs = 10;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 1e-5;
  // Multiply the learning rate by lr_decay every lr_step_epochs (0 = constant).
  double lr_decay = 1.0;
  std::size_t lr_step_epochs = 0;
  std::size_t batch_size = 1;  // subgraphs per optimizer step
  std::vector<std::size_t> hidden{64, 64};
  double leaky_slope = 0.01;
  std::size_t edge_degree = 10;
  // Pivots scored (not trained on) after every epoch for the history AP.
  double holdout_fraction = 0.1;
  std::size_t max_holdout = 200;
  std::uint64_t seed = 0;
  // Fixed-order gradient reduction inside a batch. Subgraph sampling is
  // per-pivot seeded and therefore schedule-independent either way.
  bool deterministic = true;
  unsigned threads = 1;
  std::filesystem::path checkpoint_dir;  // empty: no periodic checkpoints
  std::size_t checkpoint_every = 0;

  void validate() const;
  /// Fingerprint of everything that influences the trained parameters.
  std::uint64_t hash() const;
};

struct TrainHistory {
  std::vector<double> mean_loss;
  std::vector<double> holdout_ap;  // NaN when the holdout has no positive link
  std::vector<std::size_t> single_class_pools;
  std::vector<std::size_t> clamps;

  std::size_t epochs() const { return mean_loss.size(); }
};

struct TrainResult {
  GcnParams params;
  TrainHistory history;
};

/// Raised when a step produces a non-finite loss; carries the parameters from
/// before that step.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, GcnParams last_good, TrainHistory history)
      : Error(what), last_good_(std::move(last_good)), history_(std::move(history)) {}

  const GcnParams& last_good() const { return last_good_; }
  const TrainHistory& history() const { return history_; }

 private:
  GcnParams last_good_;
  TrainHistory history_;
};

/// SGD with momentum over shuffled pivots, one freshly sampled subgraph per
/// pivot per epoch.
TrainResult train(const EmbeddingSet& set, const TrainConfig& cfg);

/// Columns: epoch, loss, ap, single_class_pools, clamps.
void write_history_tsv(const TrainHistory& history, const std::filesystem::path& path);

}  // namespace linkgcn
