#pragma once

// Random instances shared by unit and acceptance tests.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "linkgcn/random.hpp"
#include "linkgcn/subgraph.hpp"

namespace linkgcn::fixtures {

inline Eigen::MatrixXd random_logits(std::size_t n, Rng& rng, double scale = 2.0) {
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    z(i, 0) = scale * rng.normal();
    z(i, 1) = scale * rng.normal();
  }
  return z;
}

// At least one of each class when n >= 2.
inline std::vector<std::uint8_t> random_labels(std::size_t n, Rng& rng) {
  std::vector<std::uint8_t> y(n);
  for (auto& v : y) v = rng.below(2) ? 1 : 0;
  if (n >= 2) {
    y[0] = 1;
    y[1] = 0;
  }
  return y;
}

// A free-standing subgraph: random pivot-relative features and a random
// row-stochastic adjacency with self-loops.
inline Subgraph random_subgraph(std::size_t nodes, std::size_t one_hop, std::size_t dim, Rng& rng) {
  Subgraph sg;
  sg.one_hop_count = one_hop;
  for (std::size_t i = 0; i < nodes; ++i) sg.nodes.push_back(i + 1);
  const auto n = static_cast<Eigen::Index>(nodes);
  sg.features.resize(n, static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < sg.features.size(); ++i) sg.features.data()[i] = rng.normal();
  sg.adjacency = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sg.adjacency(i, i) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && rng.uniform() < 0.5) sg.adjacency(i, j) = 1.0;
    }
    sg.adjacency.row(i) /= sg.adjacency.row(i).sum();
  }
  sg.link_labels = random_labels(one_hop, rng);
  sg.edge_degree = nodes - 1;
  return sg;
}

}  // namespace linkgcn::fixtures
