#include "linkgcn/knn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "linkgcn/error.hpp"
#include "linkgcn/parallel.hpp"

namespace linkgcn {

std::vector<std::size_t> NeighborList::indices() const {
  std::vector<std::size_t> out;
  out.reserve(neighbors.size());
  for (const auto& n : neighbors) out.push_back(n.index);
  return out;
}

void ExpansionConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (k2 < 1) throw ConfigError("k2 must be >= 1");
  if (!std::isfinite(gamma) || gamma < 1.0) throw ConfigError("expansion gamma must be >= 1");
}

std::size_t ExpansionConfig::expanded_k() const {
  const double raw = static_cast<double>(k) * gamma;
  return static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
}

double distance(const EmbeddingSet& set, std::size_t a, std::size_t b) {
  const auto& f = set.features();
  const auto ra = static_cast<Eigen::Index>(a);
  const auto rb = static_cast<Eigen::Index>(b);
  double sq = 0.0;
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    const double diff = static_cast<double>(f(ra, j)) - static_cast<double>(f(rb, j));
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

NeighborList knn(const EmbeddingSet& set, std::size_t pivot, std::size_t k) {
  const std::size_t n = set.size();
  if (pivot >= n) {
    throw ConfigError("pivot " + std::to_string(pivot) + " out of range for N=" + std::to_string(n));
  }
  if (k < 1) throw ConfigError("k must be >= 1");

  std::vector<Neighbor> all;
  all.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i != pivot) all.push_back({i, distance(set, pivot, i)});
  }
  const std::size_t take = std::min(k, all.size());
  const auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(), closer);
  all.resize(take);

  NeighborList out;
  out.pivot = pivot;
  out.neighbors = std::move(all);
  out.k_requested = k;
  out.clamped = take < k;
  return out;
}

NeighborList eknn(const EmbeddingSet& set, std::size_t pivot, const ExpansionConfig& cfg) {
  cfg.validate();
  return knn(set, pivot, cfg.expanded_k());
}

NeighborTable::NeighborTable(const EmbeddingSet& set, std::size_t depth, unsigned threads)
    : set_(&set), depth_(std::min(depth, set.size() - 1)), lists_(set.size()) {
  parallel_for(set.size(), threads, [&](std::size_t i) { lists_[i] = linkgcn::knn(set, i, depth_); });
}

NeighborList NeighborTable::knn(std::size_t pivot, std::size_t k) const {
  if (pivot >= lists_.size()) {
    throw ConfigError("pivot " + std::to_string(pivot) + " out of range for N=" +
                      std::to_string(lists_.size()));
  }
  if (k < 1) throw ConfigError("k must be >= 1");
  const std::size_t available = set_->size() - 1;
  if (k > depth_ && depth_ < available) return linkgcn::knn(*set_, pivot, k);
  const auto& full = lists_[pivot];
  NeighborList out;
  out.pivot = pivot;
  out.k_requested = k;
  const std::size_t take = std::min(k, full.neighbors.size());
  out.neighbors.assign(full.neighbors.begin(), full.neighbors.begin() + static_cast<std::ptrdiff_t>(take));
  out.clamped = take < k;
  return out;
}

NeighborList NeighborTable::eknn(std::size_t pivot, const ExpansionConfig& cfg) const {
  cfg.validate();
  return knn(pivot, cfg.expanded_k());
}

}  // namespace linkgcn
