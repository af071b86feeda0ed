#include "linkgcn/sampling.hpp"

#include <algorithm>
#include <numeric>

#include "linkgcn/error.hpp"

namespace linkgcn {

CandidateWeights riws_weights(const NeighborList& candidates, std::span<const Label> labels,
                              Label pivot_label) {
  if (candidates.neighbors.empty()) throw ConfigError("riws_weights: empty candidate list");
  CandidateWeights out;
  out.pivot = candidates.pivot;
  out.candidates = candidates.indices();
  for (const std::size_t c : out.candidates) {
    if (labels[c] == pivot_label) {
      ++out.positive_count;
    } else {
      ++out.negative_count;
    }
  }
  const std::size_t n = out.candidates.size();
  out.weights.resize(n);
  if (out.positive_count == 0 || out.negative_count == 0) {
    out.degenerate = true;
    std::fill(out.weights.begin(), out.weights.end(), 1.0 / static_cast<double>(n));
    return out;
  }
  const double pos_w = 0.5 / static_cast<double>(out.positive_count);
  const double neg_w = 0.5 / static_cast<double>(out.negative_count);
  for (std::size_t i = 0; i < n; ++i) {
    out.weights[i] = labels[out.candidates[i]] == pivot_label ? pos_w : neg_w;
  }
  return out;
}

std::vector<std::size_t> sample_one_hop(const CandidateWeights& weights, std::size_t k, Rng& rng) {
  const std::size_t n = weights.candidates.size();
  if (n <= k) return weights.candidates;

  std::vector<double> remaining = weights.weights;
  std::vector<bool> taken(n, false);
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t draw = 0; draw < k; ++draw) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) total += remaining[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      std::size_t last_positive = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i] || remaining[i] <= 0.0) continue;
        last_positive = i;
        acc += remaining[i];
        if (target < acc) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = last_positive;
    } else {
      // Only zero-weight candidates remain.
      std::size_t nth = static_cast<std::size_t>(rng.below(n - draw));
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        if (nth-- == 0) {
          pick = i;
          break;
        }
      }
    }
    taken[pick] = true;
    out.push_back(weights.candidates[pick]);
  }
  return out;
}

namespace {

// `count` picks from `members`: a uniform subset when there are enough,
// otherwise every member plus uniform duplicates.
void take_balanced(std::vector<std::size_t> members, std::size_t count, Rng& rng,
                   std::vector<std::size_t>& out) {
  if (members.size() >= count) {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(members.size() - i));
      std::swap(members[i], members[j]);
      out.push_back(members[i]);
    }
    return;
  }
  out.insert(out.end(), members.begin(), members.end());
  for (std::size_t i = members.size(); i < count; ++i) {
    out.push_back(members[static_cast<std::size_t>(rng.below(members.size()))]);
  }
}

}  // namespace

Selection resample_balanced(const NeighborList& candidates, std::span<const Label> labels,
                            Label pivot_label, std::size_t k, Rng& rng) {
  if (candidates.neighbors.empty()) throw ConfigError("resample_balanced: empty candidate pool");
  if (k == 0 || k % 2 != 0) {
    throw ConfigError("balanced re-sampling needs an even k, got " + std::to_string(k));
  }
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (const auto& n : candidates.neighbors) {
    (labels[n.index] == pivot_label ? positives : negatives).push_back(n.index);
  }
  Selection out;
  if (positives.empty() || negatives.empty()) {
    out.degenerate = true;
    out.nodes = baseline_select(candidates, k);
    out.clamped = out.nodes.size() < k;
    return out;
  }
  out.nodes.reserve(k);
  take_balanced(std::move(positives), k / 2, rng, out.nodes);
  take_balanced(std::move(negatives), k / 2, rng, out.nodes);
  return out;
}

std::vector<std::size_t> baseline_select(const NeighborList& candidates, std::size_t k) {
  const std::size_t take = std::min(k, candidates.neighbors.size());
  std::vector<std::size_t> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(candidates.neighbors[i].index);
  return out;
}

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::BaselineTopK:
      return "baseline";
    case StrategyKind::BalancedResample:
      return "resample";
    case StrategyKind::Riws:
      return "riws";
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  if (name == "baseline" || name == "topk") return StrategyKind::BaselineTopK;
  if (name == "resample" || name == "rs") return StrategyKind::BalancedResample;
  if (name == "riws") return StrategyKind::Riws;
  throw ConfigError("unknown sampling strategy '" + std::string(name) + "'");
}

std::size_t SamplingStrategy::pool_size() const {
  return kind == StrategyKind::BaselineTopK ? expansion.k : expansion.expanded_k();
}

Selection select_one_hop(const SamplingStrategy& strategy, const NeighborTable& table,
                         std::size_t pivot, Rng& rng) {
  strategy.expansion.validate();
  const std::size_t k = strategy.expansion.k;
  const NeighborList pool = table.knn(pivot, strategy.pool_size());
  const auto labels = table.set().labels();
  const Label pivot_label = labels[pivot];

  Selection out;
  switch (strategy.kind) {
    case StrategyKind::BaselineTopK:
      out.nodes = baseline_select(pool, k);
      break;
    case StrategyKind::BalancedResample:
      out = resample_balanced(pool, labels, pivot_label, k, rng);
      break;
    case StrategyKind::Riws: {
      const CandidateWeights w = riws_weights(pool, labels, pivot_label);
      out.nodes = sample_one_hop(w, k, rng);
      out.degenerate = w.degenerate;
      break;
    }
  }
  out.clamped = out.clamped || pool.clamped || out.nodes.size() < k;
  return out;
}

}  // namespace linkgcn
