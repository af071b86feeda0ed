#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "linkgcn/embedding.hpp"
#include "linkgcn/knn.hpp"

namespace linkgcn {

/// Instance-pivot subgraph around one pivot.
///
/// `nodes` lists the 1-hop nodes first (in selection order, duplicates kept as
/// separate rows), then the 2-hop nodes. The pivot itself is never a node;
/// features are expressed relative to it.
struct Subgraph {
  std::size_t pivot = 0;
  std::vector<std::size_t> nodes;
  std::size_t one_hop_count = 0;
  Eigen::MatrixXd features;   // |nodes| x d, x_v - x_pivot
  Eigen::MatrixXd adjacency;  // |nodes| x |nodes|, self-loops added, rows sum to 1
  std::vector<std::uint8_t> link_labels;  // per 1-hop node: same identity as pivot
  std::size_t edge_degree = 0;            // r after clamping
  bool degree_clamped = false;

  std::size_t size() const { return nodes.size(); }
  bool is_one_hop(std::size_t local) const { return local < one_hop_count; }
};

/// Builds the subgraph for `pivot` from its selected 1-hop nodes.
///
/// The 2-hop set is the union of each 1-hop node's k2 nearest neighbors,
/// minus the pivot and minus nodes already present. Every node then gets
/// directed edges to its r nearest nodes inside the subgraph (r is clamped to
/// |nodes|-1); A' is that adjacency plus identity, row-normalized.
Subgraph build_subgraph(const EmbeddingSet& set, std::size_t pivot,
                        std::span<const std::size_t> one_hop, const ExpansionConfig& cfg,
                        std::size_t edge_degree);

/// Same construction with 2-hop lookups served from a precomputed table.
Subgraph build_subgraph(const NeighborTable& table, std::size_t pivot,
                        std::span<const std::size_t> one_hop, const ExpansionConfig& cfg,
                        std::size_t edge_degree);

/// Debug dump: {"pivot", "nodes":[{"id","hop","label"}], "edges":[[src,dst,w]]}.
std::string subgraph_to_json(const Subgraph& sg, const EmbeddingSet& set);

}  // namespace linkgcn
