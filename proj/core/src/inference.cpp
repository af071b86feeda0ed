#include "linkgcn/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_set>

#include "linkgcn/error.hpp"
#include "linkgcn/parallel.hpp"
#include "linkgcn/random.hpp"
#include "linkgcn/subgraph.hpp"
#include "linkgcn/union_find.hpp"

namespace linkgcn {

std::vector<double> EdgeScoreSet::scores() const {
  std::vector<double> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.push_back(e.score);
  return out;
}

std::vector<std::uint8_t> EdgeScoreSet::labels() const {
  std::vector<std::uint8_t> out;
  out.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.label < 0) throw Error("edge (" + std::to_string(e.pivot) + ", " +
                                 std::to_string(e.neighbor) + ") has no ground-truth label");
    out.push_back(static_cast<std::uint8_t>(e.label));
  }
  return out;
}

namespace {

struct PivotScores {
  std::vector<EdgeScore> edges;
  bool single_class = false;
  bool clamped = false;
};

}  // namespace

EdgeScoreSet score_edges(const NeighborTable& table, const GcnParams& params,
                         const InferenceConfig& cfg, std::span<const std::size_t> pivots) {
  cfg.expansion.validate();
  const EmbeddingSet& set = table.set();
  check_input_dim(params, set.dim());

  SamplingStrategy strategy;
  strategy.kind = cfg.test_time_sampling.value_or(StrategyKind::BaselineTopK);
  strategy.expansion = cfg.expansion;

  std::vector<PivotScores> per_pivot(pivots.size());
  parallel_for(pivots.size(), cfg.threads, [&](std::size_t i) {
    const std::size_t pivot = pivots[i];
    Rng rng(derive_seed(cfg.seed, pivot));
    const Selection sel = select_one_hop(strategy, table, pivot, rng);
    const Subgraph sg = build_subgraph(table, pivot, sel.nodes, cfg.expansion, cfg.edge_degree);
    const ForwardTrace trace = forward(sg, params);
    PivotScores& out = per_pivot[i];
    out.single_class = sel.degenerate;
    out.clamped = sel.clamped || sg.degree_clamped;
    std::unordered_set<std::size_t> seen;
    for (std::size_t h = 0; h < sg.one_hop_count; ++h) {
      if (!seen.insert(sg.nodes[h]).second) continue;
      const auto row = static_cast<Eigen::Index>(h);
      out.edges.push_back({pivot, sg.nodes[h],
                           link_probability(trace.logits(row, 0), trace.logits(row, 1)),
                           static_cast<std::int8_t>(sg.link_labels[h])});
    }
  });

  EdgeScoreSet result;
  for (auto& p : per_pivot) {
    result.edges.insert(result.edges.end(), p.edges.begin(), p.edges.end());
    result.single_class_pools += p.single_class;
    result.clamps += p.clamped;
  }
  return result;
}

EdgeScoreSet score_edges(const EmbeddingSet& set, const GcnParams& params, const InferenceConfig& cfg) {
  cfg.expansion.validate();
  check_input_dim(params, set.dim());
  const std::size_t pool = cfg.test_time_sampling && *cfg.test_time_sampling != StrategyKind::BaselineTopK
                               ? cfg.expansion.expanded_k()
                               : cfg.expansion.k;
  const NeighborTable table(set, std::max(pool, cfg.expansion.k2), cfg.threads);
  std::vector<std::size_t> pivots(set.size());
  std::iota(pivots.begin(), pivots.end(), std::size_t{0});
  return score_edges(table, params, cfg, pivots);
}

double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw ConfigError("score and label counts differ");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 0) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
  }
  if (hits == 0) throw Error("average precision is undefined without positive links");
  return sum / static_cast<double>(hits);
}

double average_precision(const EdgeScoreSet& scores) {
  const auto s = scores.scores();
  const auto l = scores.labels();
  return average_precision(s, l);
}

Clustering merge_links(const EdgeScoreSet& scores, double tau, std::size_t node_count) {
  UnionFind uf(node_count);
  for (const auto& e : scores.edges) {
    if (e.pivot >= node_count || e.neighbor >= node_count) {
      throw ConfigError("edge endpoint out of range for N=" + std::to_string(node_count));
    }
    if (e.score >= tau) uf.unite(e.pivot, e.neighbor);
  }
  Clustering out;
  out.assignment.resize(node_count);
  std::vector<std::size_t> id_of_root(node_count, node_count);
  for (std::size_t i = 0; i < node_count; ++i) {
    const std::size_t root = uf.find(i);
    if (id_of_root[root] == node_count) id_of_root[root] = out.cluster_count++;
    out.assignment[i] = id_of_root[root];
  }
  return out;
}

BCubed bcubed(std::span<const std::size_t> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size()) {
    throw ConfigError("bcubed: prediction has " + std::to_string(predicted.size()) +
                      " items but truth has " + std::to_string(truth.size()));
  }
  if (predicted.empty()) throw ConfigError("bcubed: empty input");
  std::map<std::size_t, std::size_t> pred_size;
  std::map<Label, std::size_t> truth_size;
  std::map<std::pair<std::size_t, Label>, std::size_t> overlap;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    ++pred_size[predicted[i]];
    ++truth_size[truth[i]];
    ++overlap[{predicted[i], truth[i]}];
  }
  // Each of the n_ij items in cell (i, j) has precision n_ij/|P_i| and recall n_ij/|T_j|.
  double p = 0.0;
  double r = 0.0;
  for (const auto& [key, count] : overlap) {
    const double c = static_cast<double>(count);
    p += c * c / static_cast<double>(pred_size[key.first]);
    r += c * c / static_cast<double>(truth_size[key.second]);
  }
  const double n = static_cast<double>(predicted.size());
  BCubed out;
  out.precision = p / n;
  out.recall = r / n;
  out.f = out.precision + out.recall > 0.0
              ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
              : 0.0;
  return out;
}

std::vector<double> tau_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw ConfigError("tau step must lie in (0, 1]");
  std::vector<double> taus;
  const auto count = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
  for (std::size_t i = 0; i <= count; ++i) taus.push_back(std::min(1.0, static_cast<double>(i) * step));
  if (taus.back() < 1.0) taus.push_back(1.0);
  return taus;
}

ThresholdSweep sweep_threshold(const EdgeScoreSet& scores, std::span<const Label> truth,
                               std::span<const double> taus) {
  if (taus.empty()) throw ConfigError("threshold sweep needs at least one tau");
  ThresholdSweep sweep;
  for (const double tau : taus) {
    const Clustering c = merge_links(scores, tau, truth.size());
    sweep.taus.push_back(tau);
    sweep.results.push_back(bcubed(c.assignment, truth));
    sweep.cluster_counts.push_back(c.cluster_count);
    if (sweep.results.back().f > sweep.results[sweep.best].f) sweep.best = sweep.results.size() - 1;
  }
  return sweep;
}

void write_scores_tsv(const EdgeScoreSet& scores, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "pivot\tneighbor\tscore\tlabel\n";
  out.precision(17);
  for (const auto& e : scores.edges) {
    out << e.pivot << '\t' << e.neighbor << '\t' << e.score << '\t' << static_cast<int>(e.label) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_clustering_tsv(const Clustering& clustering, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "node\tcluster\n";
  for (std::size_t i = 0; i < clustering.assignment.size(); ++i) {
    out << i << '\t' << clustering.assignment[i] << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace linkgcn
