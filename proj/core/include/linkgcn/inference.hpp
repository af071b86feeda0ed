#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "linkgcn/embedding.hpp"
#include "linkgcn/gcn.hpp"
#include "linkgcn/knn.hpp"
#include "linkgcn/sampling.hpp"

namespace linkgcn {

struct EdgeScore {
  std::size_t pivot = 0;
  std::size_t neighbor = 0;
  double score = 0.0;      // link probability in [0, 1]
  std::int8_t label = -1;  // ground-truth link bit, -1 when unknown
};

struct EdgeScoreSet {
  std::vector<EdgeScore> edges;
  std::size_t single_class_pools = 0;
  std::size_t clamps = 0;

  std::vector<double> scores() const;
  std::vector<std::uint8_t> labels() const;
};

struct InferenceConfig {
  ExpansionConfig expansion;   // k and k2; gamma only matters for test-time sampling
  std::size_t edge_degree = 10;
  // Deterministic top-k subgraphs unless a sampling strategy is requested.
  std::optional<StrategyKind> test_time_sampling;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Scores every (pivot, 1-hop neighbor) pair of every pivot.
EdgeScoreSet score_edges(const EmbeddingSet& set, const GcnParams& params, const InferenceConfig& cfg);

/// Scores the listed pivots only, with neighbor lookups from `table`.
EdgeScoreSet score_edges(const NeighborTable& table, const GcnParams& params,
                         const InferenceConfig& cfg, std::span<const std::size_t> pivots);

/// Mean over positives of precision at that positive's rank; scores sorted
/// descending, ties kept in input order. Throws when there is no positive.
double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels);
double average_precision(const EdgeScoreSet& scores);

struct Clustering {
  std::vector<std::size_t> assignment;  // dense ids, numbered by first node
  std::size_t cluster_count = 0;
};

/// Connected components over undirected edges with score >= tau.
Clustering merge_links(const EdgeScoreSet& scores, double tau, std::size_t node_count);

struct BCubed {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

BCubed bcubed(std::span<const std::size_t> predicted, std::span<const Label> truth);

struct ThresholdSweep {
  std::vector<double> taus;
  std::vector<BCubed> results;
  std::vector<std::size_t> cluster_counts;
  std::size_t best = 0;  // index of the highest F (first on ties)

  double best_tau() const { return taus[best]; }
  const BCubed& best_result() const { return results[best]; }
};

/// 0, step, 2*step, ..., 1.
std::vector<double> tau_grid(double step = 0.05);

ThresholdSweep sweep_threshold(const EdgeScoreSet& scores, std::span<const Label> truth,
                               std::span<const double> taus);

void write_scores_tsv(const EdgeScoreSet& scores, const std::filesystem::path& path);
void write_clustering_tsv(const Clustering& clustering, const std::filesystem::path& path);

}  // namespace linkgcn
