#include "linkgcn/subgraph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "linkgcn/error.hpp"

namespace linkgcn {

namespace {

using KnnFn = std::function<NeighborList(std::size_t, std::size_t)>;

Subgraph build_impl(const EmbeddingSet& set, std::size_t pivot, std::span<const std::size_t> one_hop,
                    const ExpansionConfig& cfg, std::size_t edge_degree, const KnnFn& neighbors_of) {
  if (pivot >= set.size()) throw ConfigError("pivot out of range");
  if (one_hop.empty()) throw ConfigError("build_subgraph: empty 1-hop selection");
  if (cfg.k2 < 1) throw ConfigError("k2 must be >= 1");

  Subgraph sg;
  sg.pivot = pivot;
  sg.one_hop_count = one_hop.size();
  sg.nodes.assign(one_hop.begin(), one_hop.end());

  std::unordered_set<std::size_t> present(one_hop.begin(), one_hop.end());
  for (const std::size_t h : one_hop) {
    if (h >= set.size() || h == pivot) throw ConfigError("invalid 1-hop node " + std::to_string(h));
  }
  std::unordered_set<std::size_t> expanded;
  for (const std::size_t h : one_hop) {
    if (!expanded.insert(h).second) continue;
    for (const auto& nb : neighbors_of(h, cfg.k2).neighbors) {
      if (nb.index == pivot) continue;
      if (present.insert(nb.index).second) sg.nodes.push_back(nb.index);
    }
  }

  const auto n = static_cast<Eigen::Index>(sg.nodes.size());
  const auto d = static_cast<Eigen::Index>(set.dim());
  const auto& f = set.features();
  const auto p = static_cast<Eigen::Index>(pivot);
  sg.features.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto v = static_cast<Eigen::Index>(sg.nodes[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < d; ++j) {
      sg.features(i, j) = static_cast<double>(f(v, j)) - static_cast<double>(f(p, j));
    }
  }

  sg.edge_degree = edge_degree;
  if (edge_degree >= sg.nodes.size()) {
    sg.edge_degree = sg.nodes.size() - 1;
    sg.degree_clamped = true;
  }

  // Local distances from pivot-relative rows (translation leaves them equal
  // to the original embedding distances).
  sg.adjacency = Eigen::MatrixXd::Zero(n, n);
  const double w = 1.0 / static_cast<double>(sg.edge_degree + 1);
  std::vector<std::pair<double, Eigen::Index>> order;
  order.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    order.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) order.emplace_back((sg.features.row(i) - sg.features.row(j)).squaredNorm(), j);
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sg.edge_degree),
                      order.end());
    sg.adjacency(i, i) = w;
    for (std::size_t e = 0; e < sg.edge_degree; ++e) sg.adjacency(i, order[e].second) = w;
  }

  const auto labels = set.labels();
  sg.link_labels.resize(sg.one_hop_count);
  for (std::size_t i = 0; i < sg.one_hop_count; ++i) {
    sg.link_labels[i] = labels[sg.nodes[i]] == labels[pivot] ? 1 : 0;
  }
  return sg;
}

}  // namespace

Subgraph build_subgraph(const EmbeddingSet& set, std::size_t pivot,
                        std::span<const std::size_t> one_hop, const ExpansionConfig& cfg,
                        std::size_t edge_degree) {
  return build_impl(set, pivot, one_hop, cfg, edge_degree,
                    [&](std::size_t node, std::size_t k) { return knn(set, node, k); });
}

Subgraph build_subgraph(const NeighborTable& table, std::size_t pivot,
                        std::span<const std::size_t> one_hop, const ExpansionConfig& cfg,
                        std::size_t edge_degree) {
  return build_impl(table.set(), pivot, one_hop, cfg, edge_degree,
                    [&](std::size_t node, std::size_t k) { return table.knn(node, k); });
}

std::string subgraph_to_json(const Subgraph& sg, const EmbeddingSet& set) {
  nlohmann::json j;
  j["pivot"] = sg.pivot;
  j["pivot_label"] = set.label(sg.pivot);
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (std::size_t i = 0; i < sg.nodes.size(); ++i) {
    nodes.push_back({{"id", sg.nodes[i]},
                     {"hop", sg.is_one_hop(i) ? 1 : 2},
                     {"label", set.label(sg.nodes[i])}});
  }
  auto& edges = j["edges"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < sg.adjacency.rows(); ++r) {
    for (Eigen::Index c = 0; c < sg.adjacency.cols(); ++c) {
      if (r != c && sg.adjacency(r, c) > 0.0) edges.push_back({r, c, sg.adjacency(r, c)});
    }
  }
  j["link_labels"] = sg.link_labels;
  return j.dump();
}

}  // namespace linkgcn
