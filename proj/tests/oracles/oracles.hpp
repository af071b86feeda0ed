#pragma once

// Brute-force reference implementations for the tests. Nothing here calls into
// the library's metric, search or gradient code.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace linkgcn::oracle {

/// AP from a fully materialized ranking: sort (score desc, input index asc),
/// then sum precision at every positive rank.
double ap(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels);

struct BCubedValue {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

/// Per-item BCubed by explicit O(N^2) pair counting.
BCubedValue bcubed(const std::vector<std::size_t>& predicted, const std::vector<int>& truth);

/// Central differences, one coordinate at a time.
Eigen::VectorXd gradient(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                         double eps = 1e-5);

/// Largest entrywise |a - b| / max(|a|, |b|, floor). The floor keeps entries
/// that are zero up to rounding from dominating.
double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-6);

struct NeighborRef {
  std::size_t index;
  double distance;
};

/// Sorts every other row by (distance, index) and returns the first k.
/// `rows` is row-major N x d.
std::vector<NeighborRef> knn(const std::vector<std::vector<float>>& rows, std::size_t pivot,
                             std::size_t k);

/// Connected components by repeated relaxation of a label array.
std::vector<std::size_t> components(std::size_t n,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& edges);

/// True when two assignments describe the same partition.
bool same_partition(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

}  // namespace linkgcn::oracle
