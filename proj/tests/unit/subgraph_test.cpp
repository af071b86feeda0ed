#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>
#include <json.hpp>

#include "linkgcn/error.hpp"
#include "linkgcn/sampling.hpp"
#include "linkgcn/subgraph.hpp"
#include "test_util.hpp"

using namespace linkgcn;

namespace {

// 1-D raw fixture. From pivot 0 with 1-hop {1, 2} and k2 = 2:
//   knn(1) = {0, 3} adds 3; knn(2) = {0, 4} (tie at 1.5, lower index first) adds 4.
// Node 5 stays out.
EmbeddingSet six_points() {
  return linkgcn::testing::make_set({{0.0f}, {1.0f}, {-1.5f}, {2.2f}, {-3.0f}, {5.0f}},
                                    {0, 0, 1, 1, 0, 1});
}

}  // namespace

TEST(Subgraph, SmallestGraph) {
  const EmbeddingSet set = linkgcn::testing::make_set({{0.0f}, {1.0f}}, {0, 1});
  const std::vector<std::size_t> one_hop{1};
  const Subgraph sg = build_subgraph(set, 0, one_hop, {1, 1.0, 1}, 10);
  ASSERT_EQ(sg.size(), 1u);
  EXPECT_EQ(sg.adjacency.rows(), 1);
  EXPECT_DOUBLE_EQ(sg.adjacency(0, 0), 1.0);
  EXPECT_TRUE(sg.degree_clamped);
  EXPECT_EQ(sg.edge_degree, 0u);
  EXPECT_EQ(sg.link_labels, (std::vector<std::uint8_t>{0}));
}

TEST(Subgraph, HandBuiltSixNodeFixture) {
  const EmbeddingSet set = six_points();
  const std::vector<std::size_t> one_hop{1, 2};
  const Subgraph sg = build_subgraph(set, 0, one_hop, {2, 1.0, 2}, 2);
  EXPECT_EQ(sg.nodes, (std::vector<std::size_t>{1, 2, 3, 4}));
  EXPECT_EQ(sg.one_hop_count, 2u);
  EXPECT_EQ(sg.link_labels, (std::vector<std::uint8_t>{1, 0}));
  EXPECT_FALSE(sg.degree_clamped);

  Eigen::VectorXd x(4);
  x << 1.0, -1.5, static_cast<double>(2.2f), -3.0;
  EXPECT_TRUE(sg.features.col(0).isApprox(x));

  // Local nearest two: 0 -> {2, 1}, 1 -> {3, 0}, 2 -> {0, 1}, 3 -> {1, 0}.
  const double t = 1.0 / 3.0;
  Eigen::MatrixXd want(4, 4);
  want << t, t, t, 0,
          t, t, 0, t,
          t, t, t, 0,
          t, t, 0, t;
  EXPECT_TRUE(sg.adjacency.isApprox(want, 1e-15)) << sg.adjacency;
}

TEST(Subgraph, RowsSumToOneAndInvariantsHold) {
  const EmbeddingSet set = generate_synthetic(linkgcn::testing::blobs({20, 15, 3, 3, 3}, 7, 16));
  const NeighborTable table(set, 20);
  Rng rng(1);
  for (const auto kind : {StrategyKind::BaselineTopK, StrategyKind::BalancedResample, StrategyKind::Riws}) {
    const SamplingStrategy strategy{kind, {10, 2.0, 5}};
    for (std::size_t p = 0; p < set.size(); ++p) {
      const Selection sel = select_one_hop(strategy, table, p, rng);
      const Subgraph sg = build_subgraph(table, p, sel.nodes, strategy.expansion, 10);
      EXPECT_EQ(sg.one_hop_count, 10u);
      for (Eigen::Index r = 0; r < sg.adjacency.rows(); ++r) {
        EXPECT_NEAR(sg.adjacency.row(r).sum(), 1.0, 1e-9);
      }
      EXPECT_EQ(std::count(sg.nodes.begin(), sg.nodes.end(), p), 0);
      EXPECT_TRUE(sg.features.allFinite());
      // 2-hop nodes are distinct and disjoint from the 1-hop set.
      std::vector<std::size_t> tail(sg.nodes.begin() + 10, sg.nodes.end());
      std::sort(tail.begin(), tail.end());
      EXPECT_EQ(std::adjacent_find(tail.begin(), tail.end()), tail.end());
      for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_FALSE(std::binary_search(tail.begin(), tail.end(), sg.nodes[i]));
      }
    }
  }
}

TEST(Subgraph, TableAndDirectSearchAgree) {
  const EmbeddingSet set = generate_synthetic(linkgcn::testing::blobs({12, 12, 12}, 2));
  const NeighborTable table(set, 10);
  for (std::size_t p = 0; p < set.size(); ++p) {
    const auto one_hop = knn(set, p, 6).indices();
    const Subgraph a = build_subgraph(set, p, one_hop, {6, 1.0, 4}, 5);
    const Subgraph b = build_subgraph(table, p, one_hop, {6, 1.0, 4}, 5);
    EXPECT_EQ(a.nodes, b.nodes);
    EXPECT_TRUE(a.adjacency == b.adjacency);
  }
}

TEST(Subgraph, DuplicatedOneHopNodesStaySeparateRows) {
  const EmbeddingSet set = six_points();
  const std::vector<std::size_t> one_hop{1, 1, 2};
  const Subgraph sg = build_subgraph(set, 0, one_hop, {3, 1.0, 2}, 2);
  EXPECT_EQ(sg.one_hop_count, 3u);
  EXPECT_EQ(sg.nodes[0], 1u);
  EXPECT_EQ(sg.nodes[1], 1u);
  EXPECT_EQ(sg.nodes.size(), 5u);
  EXPECT_TRUE(sg.features.row(0) == sg.features.row(1));
}

TEST(Subgraph, TranslationCovariantOnRawFixtures) {
  Rng rng(4);
  std::vector<std::vector<float>> rows(25, std::vector<float>(3));
  std::vector<std::int64_t> labels(25);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    // Multiples of 1/8 keep the shifted floats exact.
    for (auto& v : rows[i]) v = static_cast<float>(static_cast<int>(rng.below(64)) - 32) / 8.0f;
    labels[i] = static_cast<std::int64_t>(i % 3);
  }
  auto shifted = rows;
  for (auto& r : shifted) {
    r[0] += 3.25f;
    r[1] -= 1.5f;
  }
  const EmbeddingSet a = linkgcn::testing::make_set(rows, labels);
  const EmbeddingSet b = linkgcn::testing::make_set(shifted, labels);
  for (std::size_t p = 0; p < a.size(); ++p) {
    const auto one_hop = knn(a, p, 5).indices();
    ASSERT_EQ(one_hop, knn(b, p, 5).indices());
    const Subgraph sa = build_subgraph(a, p, one_hop, {5, 1.0, 3}, 4);
    const Subgraph sb = build_subgraph(b, p, one_hop, {5, 1.0, 3}, 4);
    EXPECT_TRUE(sa.features == sb.features);
    EXPECT_TRUE(sa.adjacency == sb.adjacency);
  }
}

TEST(Subgraph, RelabelingNodesGivesAnIsomorphicGraph) {
  const EmbeddingSet set = generate_synthetic(linkgcn::testing::blobs({10, 10, 10}, 3));
  std::vector<std::size_t> perm(set.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(5);
  rng.shuffle(perm);
  FeatureMatrix f(set.features().rows(), set.features().cols());
  std::vector<std::int64_t> labels(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    f.row(static_cast<Eigen::Index>(perm[i])) = set.features().row(static_cast<Eigen::Index>(i));
    labels[perm[i]] = set.label(i);
  }
  const EmbeddingSet moved(f, labels, "perm", EmbeddingSet::Normalize::No);
  for (std::size_t p = 0; p < set.size(); ++p) {
    const auto one_hop = knn(set, p, 6).indices();
    std::vector<std::size_t> mapped;
    for (const auto v : one_hop) mapped.push_back(perm[v]);
    const Subgraph a = build_subgraph(set, p, one_hop, {6, 1.0, 3}, 4);
    const Subgraph b = build_subgraph(moved, perm[p], mapped, {6, 1.0, 3}, 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(perm[a.nodes[i]], b.nodes[i]);
    EXPECT_TRUE(a.features == b.features);
    EXPECT_TRUE(a.adjacency == b.adjacency);
    EXPECT_EQ(a.link_labels, b.link_labels);
  }
}

TEST(Subgraph, RejectsBadInput) {
  const EmbeddingSet set = six_points();
  const std::vector<std::size_t> none;
  EXPECT_THROW(build_subgraph(set, 0, none, {2, 1.0, 2}, 2), ConfigError);
  const std::vector<std::size_t> self{0};
  EXPECT_THROW(build_subgraph(set, 0, self, {2, 1.0, 2}, 2), ConfigError);
  const std::vector<std::size_t> out{9};
  EXPECT_THROW(build_subgraph(set, 0, out, {2, 1.0, 2}, 2), ConfigError);
}

TEST(Subgraph, JsonDumpListsNodesAndEdges) {
  const EmbeddingSet set = six_points();
  const std::vector<std::size_t> one_hop{1, 2};
  const Subgraph sg = build_subgraph(set, 0, one_hop, {2, 1.0, 2}, 2);
  const auto j = nlohmann::json::parse(subgraph_to_json(sg, set));
  EXPECT_EQ(j.at("pivot"), 0);
  EXPECT_EQ(j.at("nodes").size(), 4u);
  EXPECT_EQ(j.at("edges").size(), 8u);
  EXPECT_EQ(j.at("nodes")[2].at("hop"), 2);
}
