#pragma once

#include <cstddef>
#include <vector>

#include "linkgcn/embedding.hpp"

namespace linkgcn {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Distance-ordered neighbors of a pivot (pivot excluded).
struct NeighborList {
  std::size_t pivot = 0;
  std::vector<Neighbor> neighbors;
  std::size_t k_requested = 0;
  bool clamped = false;  // fewer than k_requested were available

  std::size_t size() const { return neighbors.size(); }
  std::vector<std::size_t> indices() const;
};

/// 1-hop count k, expansion coefficient gamma (>= 1) and 2-hop count k2.
struct ExpansionConfig {
  std::size_t k = 10;
  double gamma = 1.0;
  std::size_t k2 = 5;

  void validate() const;
  /// ceil(k * gamma), robust to binary rounding of gamma (10 * 1.2 -> 12).
  std::size_t expanded_k() const;
};

/// Euclidean distance between rows a and b, accumulated in double.
double distance(const EmbeddingSet& set, std::size_t a, std::size_t b);

/// Exact k nearest neighbors of `pivot`; ties broken by ascending index.
/// Returns min(k, N-1) neighbors.
NeighborList knn(const EmbeddingSet& set, std::size_t pivot, std::size_t k);

/// The pivot's ceil(k * gamma) nearest neighbors: the candidate pool for 1-hop
/// selection. Clamps to N-1 and sets `clamped` when the set is too small.
NeighborList eknn(const EmbeddingSet& set, std::size_t pivot, const ExpansionConfig& cfg);

/// Precomputed top-`depth` neighbor lists for every node. Queries with
/// k <= depth are answered as prefixes, which are exact because knn results
/// nest; deeper queries fall back to brute force.
class NeighborTable {
 public:
  NeighborTable(const EmbeddingSet& set, std::size_t depth, unsigned threads = 1);

  NeighborList knn(std::size_t pivot, std::size_t k) const;
  NeighborList eknn(std::size_t pivot, const ExpansionConfig& cfg) const;

  std::size_t depth() const { return depth_; }
  const EmbeddingSet& set() const { return *set_; }

 private:
  const EmbeddingSet* set_;
  std::size_t depth_;
  std::vector<NeighborList> lists_;
};

}  // namespace linkgcn
