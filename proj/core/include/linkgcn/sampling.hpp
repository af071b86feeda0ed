#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "linkgcn/embedding.hpp"
#include "linkgcn/knn.hpp"
#include "linkgcn/random.hpp"

namespace linkgcn {

/// Reverse-imbalance selection weights over a pivot's eKNN pool.
///
/// Same-identity candidates share half of the probability mass and
/// different-identity candidates share the other half, so a class with few
/// members in the pool gets proportionally larger per-member weight. When the
/// pool holds a single class the weights fall back to uniform and
/// `degenerate` is set.
struct CandidateWeights {
  std::size_t pivot = 0;
  std::vector<std::size_t> candidates;
  std::vector<double> weights;
  std::size_t positive_count = 0;
  std::size_t negative_count = 0;
  bool degenerate = false;
};

CandidateWeights riws_weights(const NeighborList& candidates, std::span<const Label> labels,
                              Label pivot_label);

/// Draws min(k, pool) distinct candidates by sequential weighted sampling
/// without replacement (draw, remove, renormalize).
std::vector<std::size_t> sample_one_hop(const CandidateWeights& weights, std::size_t k, Rng& rng);

/// 1-hop node choice for one pivot. `nodes` may contain duplicates for the
/// balanced re-sampling strategy.
struct Selection {
  std::vector<std::size_t> nodes;
  bool degenerate = false;  // single-class candidate pool
  bool clamped = false;     // pool smaller than requested
};

/// k/2 same-class plus k/2 different-class picks: a surplus class is
/// under-sampled uniformly, a deficit class is topped up by uniform
/// duplication. k must be even.
Selection resample_balanced(const NeighborList& candidates, std::span<const Label> labels,
                            Label pivot_label, std::size_t k, Rng& rng);

/// The first k entries of the distance-ordered pool.
std::vector<std::size_t> baseline_select(const NeighborList& candidates, std::size_t k);

enum class StrategyKind { BaselineTopK, BalancedResample, Riws };

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy(std::string_view name);

struct SamplingStrategy {
  StrategyKind kind = StrategyKind::BaselineTopK;
  ExpansionConfig expansion;

  /// The pool actually used: baseline ignores gamma.
  std::size_t pool_size() const;
};

/// Pool construction plus strategy dispatch for one pivot.
Selection select_one_hop(const SamplingStrategy& strategy, const NeighborTable& table,
                         std::size_t pivot, Rng& rng);

}  // namespace linkgcn
