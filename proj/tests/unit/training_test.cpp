#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "linkgcn/error.hpp"
#include "linkgcn/inference.hpp"
#include "linkgcn/training.hpp"
#include "test_util.hpp"

using namespace linkgcn;
using linkgcn::testing::TempDir;

namespace {

EmbeddingSet two_blobs() {
  SyntheticSpec s = linkgcn::testing::blobs({40, 40}, 12, 8);
  s.spread = 0.3;
  s.separation = 1.0;
  return generate_synthetic(s);
}

TrainConfig small_config(StrategyKind kind = StrategyKind::BaselineTopK) {
  TrainConfig cfg;
  cfg.strategy.kind = kind;
  cfg.strategy.expansion = {6, kind == StrategyKind::BaselineTopK ? 1.0 : 2.0, 3};
  cfg.hidden = {8, 8};
  cfg.edge_degree = 4;
  cfg.epochs = 10;
  cfg.learning_rate = 0.01;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST(Train, LossDecreasesOnSeparableData) {
  const EmbeddingSet set = two_blobs();
  const TrainResult r = train(set, small_config());
  ASSERT_EQ(r.history.epochs(), 10u);
  EXPECT_LT(r.history.mean_loss.back(), r.history.mean_loss.front());
  EXPECT_EQ(r.history.holdout_ap.size(), 10u);
  EXPECT_EQ(r.history.single_class_pools.size(), 10u);
  EXPECT_EQ(r.history.clamps.size(), 10u);
}

TEST(Train, DeterministicGivenSeed) {
  const EmbeddingSet set = two_blobs();
  for (const auto kind : {StrategyKind::BaselineTopK, StrategyKind::BalancedResample, StrategyKind::Riws}) {
    TrainConfig cfg = small_config(kind);
    cfg.epochs = 3;
    const TrainResult a = train(set, cfg);
    const TrainResult b = train(set, cfg);
    EXPECT_TRUE(a.params.values() == b.params.values()) << to_string(kind);
    cfg.seed = 4;
    EXPECT_FALSE(train(set, cfg).params.values() == a.params.values());
  }
}

TEST(Train, ThreadCountDoesNotChangeDeterministicResults) {
  const EmbeddingSet set = two_blobs();
  TrainConfig cfg = small_config(StrategyKind::Riws);
  cfg.epochs = 2;
  cfg.batch_size = 4;
  const TrainResult one = train(set, cfg);
  cfg.threads = 3;
  const TrainResult three = train(set, cfg);
  EXPECT_TRUE(one.params.values() == three.params.values());
}

TEST(Train, BatchingAndStepDecayRun) {
  const EmbeddingSet set = two_blobs();
  TrainConfig cfg = small_config(StrategyKind::BalancedResample);
  cfg.epochs = 4;
  cfg.batch_size = 8;
  cfg.lr_decay = 0.5;
  cfg.lr_step_epochs = 2;
  cfg.loss.kind = LossKind::Focal;
  const TrainResult r = train(set, cfg);
  EXPECT_TRUE(r.params.values().allFinite());
}

TEST(Train, RejectsBadConfig) {
  const EmbeddingSet set = two_blobs();
  TrainConfig cfg = small_config();
  cfg.epochs = 0;
  EXPECT_THROW(train(set, cfg), ConfigError);
  cfg = small_config();
  cfg.learning_rate = 0.0;
  EXPECT_THROW(train(set, cfg), ConfigError);
  cfg = small_config();
  cfg.momentum = 1.0;
  EXPECT_THROW(train(set, cfg), ConfigError);
  cfg = small_config(StrategyKind::BalancedResample);
  cfg.strategy.expansion.k = 5;
  EXPECT_THROW(train(set, cfg), ConfigError);
  cfg = small_config(StrategyKind::Riws);
  cfg.strategy.expansion = {50, 2.0, 3};
  EXPECT_THROW(train(set, cfg), ConfigError);
}

TEST(Train, RiwsResamplesSubgraphsAcrossEpochs) {
  // Same pivot, same epoch-0 vs epoch-1 streams as the trainer uses.
  const EmbeddingSet set = two_blobs();
  const TrainConfig cfg = small_config(StrategyKind::Riws);
  const NeighborTable table(set, 12);
  bool differs = false;
  for (std::size_t pivot = 0; pivot < set.size() && !differs; ++pivot) {
    Rng e0(derive_seed(cfg.seed, 4, 0 * set.size() + pivot));
    Rng e1(derive_seed(cfg.seed, 4, 1 * set.size() + pivot));
    auto a = select_one_hop(cfg.strategy, table, pivot, e0).nodes;
    auto b = select_one_hop(cfg.strategy, table, pivot, e1).nodes;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    differs = a != b;
  }
  EXPECT_TRUE(differs);
}

TEST(Train, DivergenceKeepsLastGoodParameters) {
  const EmbeddingSet set = two_blobs();
  TrainConfig cfg = small_config();
  cfg.learning_rate = 1e300;
  cfg.momentum = 0.0;
  TempDir dir;
  cfg.checkpoint_dir = dir.path();
  try {
    train(set, cfg);
    FAIL() << "expected divergence";
  } catch (const TrainingDiverged& e) {
    EXPECT_TRUE(e.last_good().values().allFinite());
    EXPECT_TRUE(std::filesystem::exists(dir / "last_good.lgck"));
  }
}

TEST(Train, PeriodicCheckpointsAndHistoryTsv) {
  const EmbeddingSet set = two_blobs();
  TrainConfig cfg = small_config();
  cfg.epochs = 4;
  cfg.checkpoint_every = 2;
  TempDir dir;
  cfg.checkpoint_dir = dir.path();
  const TrainResult r = train(set, cfg);
  EXPECT_TRUE(std::filesystem::exists(dir / "epoch_2.lgck"));
  EXPECT_TRUE(std::filesystem::exists(dir / "epoch_4.lgck"));
  EXPECT_TRUE(load_checkpoint(dir / "epoch_4.lgck").params.values() == r.params.values());
  write_history_tsv(r.history, dir / "h.tsv");
  std::ifstream in(dir / "h.tsv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "epoch\tloss\tap\tsingle_class_pools\tclamps");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 4);
}

TEST(Train, ConfigHashTracksFields) {
  TrainConfig a = small_config();
  TrainConfig b = a;
  EXPECT_EQ(a.hash(), b.hash());
  b.learning_rate = 0.02;
  EXPECT_NE(a.hash(), b.hash());
  b = a;
  b.loss.kind = LossKind::ClassBalance;
  EXPECT_NE(a.hash(), b.hash());
}
