#include "linkgcn/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>

#include "linkgcn/hash.hpp"
#include "linkgcn/inference.hpp"
#include "linkgcn/knn.hpp"
#include "linkgcn/parallel.hpp"
#include "linkgcn/random.hpp"
#include "linkgcn/subgraph.hpp"

namespace linkgcn {

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kHoldoutStream = 2;
constexpr std::uint64_t kShuffleStream = 3;
constexpr std::uint64_t kSampleStream = 4;

struct Prepared {
  Subgraph graph;
  bool single_class = false;
  bool clamped = false;
};

struct StepOutput {
  double loss = 0.0;
  Eigen::VectorXd grad;
};

StepOutput loss_and_grad(const Subgraph& sg, const GcnParams& params, const LossConfig& loss) {
  ForwardTrace trace = forward(sg, params);
  const LossResult l = compute_loss(loss, trace.logits, sg.link_labels);
  StepOutput out;
  out.loss = l.value;
  if (std::isfinite(l.value)) out.grad = backward(trace, params, l.grad).values();
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  strategy.expansion.validate();
  loss.validate();
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight decay must be >= 0");
  if (!(lr_decay > 0.0)) throw ConfigError("lr_decay must be > 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (edge_degree < 1) throw ConfigError("edge degree r must be >= 1");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("holdout_fraction must lie in [0, 1)");
  }
  if (strategy.kind == StrategyKind::BalancedResample && strategy.expansion.k % 2 != 0) {
    throw ConfigError("balanced re-sampling needs an even k");
  }
  GcnArchitecture{1, hidden, leaky_slope}.validate();
}

std::uint64_t TrainConfig::hash() const {
  Fnv1a h;
  h.str("train-v1")
      .str(to_string(strategy.kind))
      .u64(strategy.expansion.k)
      .f64(strategy.expansion.gamma)
      .u64(strategy.expansion.k2)
      .str(to_string(loss.kind))
      .f64(loss.focal_alpha_pos)
      .f64(loss.focal_gamma)
      .u64(epochs)
      .f64(learning_rate)
      .f64(momentum)
      .f64(weight_decay)
      .f64(lr_decay)
      .u64(lr_step_epochs)
      .u64(batch_size)
      .u64(hidden.size());
  for (const std::size_t w : hidden) h.u64(w);
  h.f64(leaky_slope).u64(edge_degree).f64(holdout_fraction).u64(max_holdout).u64(seed);
  h.u64(deterministic ? 1 : 0);
  return h.digest();
}

TrainResult train(const EmbeddingSet& set, const TrainConfig& cfg) {
  cfg.validate();
  const std::size_t pool = cfg.strategy.pool_size();
  if (set.size() - 1 < pool) {
    throw ConfigError("dataset has " + std::to_string(set.size()) + " rows, too few for a pool of " +
                      std::to_string(pool) + " candidates");
  }

  GcnParams params = init_params(set.dim(), cfg.hidden, derive_seed(cfg.seed, kInitStream),
                                 cfg.leaky_slope);
  Eigen::VectorXd velocity = Eigen::VectorXd::Zero(params.values().size());
  // Parameters whose every loss so far was finite; handed back on divergence.
  Eigen::VectorXd last_good = params.values();

  std::vector<std::size_t> pivots(set.size());
  std::iota(pivots.begin(), pivots.end(), std::size_t{0});
  {
    Rng rng(derive_seed(cfg.seed, kHoldoutStream));
    rng.shuffle(pivots);
  }
  const std::size_t holdout_count = std::min(
      cfg.max_holdout,
      static_cast<std::size_t>(std::floor(cfg.holdout_fraction * static_cast<double>(set.size()))));
  std::vector<std::size_t> holdout(pivots.begin(), pivots.begin() + static_cast<std::ptrdiff_t>(holdout_count));
  std::vector<std::size_t> train_pivots(pivots.begin() + static_cast<std::ptrdiff_t>(holdout_count), pivots.end());
  std::sort(holdout.begin(), holdout.end());
  std::sort(train_pivots.begin(), train_pivots.end());

  const NeighborTable table(set, std::max({pool, cfg.strategy.expansion.k, cfg.strategy.expansion.k2}),
                            cfg.threads);

  InferenceConfig eval_cfg;
  eval_cfg.expansion = cfg.strategy.expansion;
  eval_cfg.edge_degree = cfg.edge_degree;
  eval_cfg.threads = cfg.threads;

  TrainHistory history;
  const std::size_t chunk = std::max<std::size_t>(cfg.batch_size, 64);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double lr = cfg.learning_rate;
    if (cfg.lr_step_epochs > 0) {
      lr *= std::pow(cfg.lr_decay, static_cast<double>(epoch / cfg.lr_step_epochs));
    }
    std::vector<std::size_t> order = train_pivots;
    Rng shuffle_rng(derive_seed(cfg.seed, kShuffleStream, epoch));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    std::size_t single_class = 0;
    std::size_t clamps = 0;

    for (std::size_t begin = 0; begin < order.size(); begin += chunk) {
      const std::size_t end = std::min(order.size(), begin + chunk);
      std::vector<Prepared> prepared(end - begin);
      parallel_for(prepared.size(), cfg.threads, [&](std::size_t i) {
        const std::size_t pivot = order[begin + i];
        Rng rng(derive_seed(cfg.seed, kSampleStream, epoch * set.size() + pivot));
        const Selection sel = select_one_hop(cfg.strategy, table, pivot, rng);
        Prepared& p = prepared[i];
        p.graph = build_subgraph(table, pivot, sel.nodes, cfg.strategy.expansion, cfg.edge_degree);
        p.single_class = sel.degenerate;
        p.clamped = sel.clamped || p.graph.degree_clamped;
      });

      for (std::size_t b = 0; b < prepared.size(); b += cfg.batch_size) {
        const std::size_t batch_end = std::min(prepared.size(), b + cfg.batch_size);
        const std::size_t batch_n = batch_end - b;
        std::vector<StepOutput> outputs(batch_n);
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.values().size());
        if (cfg.deterministic || cfg.threads <= 1 || batch_n == 1) {
          parallel_for(batch_n, batch_n > 1 ? cfg.threads : 1u, [&](std::size_t i) {
            outputs[i] = loss_and_grad(prepared[b + i].graph, params, cfg.loss);
          });
          for (const auto& o : outputs) {
            if (o.grad.size() > 0) grad += o.grad;
          }
        } else {
          std::mutex grad_mutex;
          parallel_for(batch_n, cfg.threads, [&](std::size_t i) {
            outputs[i] = loss_and_grad(prepared[b + i].graph, params, cfg.loss);
            if (outputs[i].grad.size() == 0) return;
            std::lock_guard lock(grad_mutex);
            grad += outputs[i].grad;
          });
        }
        for (std::size_t i = 0; i < batch_n; ++i) {
          if (!std::isfinite(outputs[i].loss)) {
            const std::size_t pivot = prepared[b + i].graph.pivot;
            params.values() = last_good;
            if (!cfg.checkpoint_dir.empty()) {
              std::filesystem::create_directories(cfg.checkpoint_dir);
              save_checkpoint(params, cfg.checkpoint_dir / "last_good.lgck", cfg.hash());
            }
            throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch) + ", pivot " +
                                       std::to_string(pivot),
                                   params, history);
          }
          loss_sum += outputs[i].loss;
          ++loss_count;
          single_class += prepared[b + i].single_class;
          clamps += prepared[b + i].clamped;
        }
        last_good = params.values();
        grad /= static_cast<double>(batch_n);
        auto& theta = params.values();
        grad += cfg.weight_decay * theta;
        velocity = cfg.momentum * velocity + grad;
        theta -= lr * velocity;
      }
    }

    history.mean_loss.push_back(loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0);
    history.single_class_pools.push_back(single_class);
    history.clamps.push_back(clamps);
    double ap = std::numeric_limits<double>::quiet_NaN();
    if (!holdout.empty()) {
      const EdgeScoreSet scored = score_edges(table, params, eval_cfg, holdout);
      try {
        ap = average_precision(scored);
      } catch (const Error&) {
        // no positive link among the holdout pairs
      }
    }
    history.holdout_ap.push_back(ap);

    if (!cfg.checkpoint_dir.empty() && cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0) {
      std::filesystem::create_directories(cfg.checkpoint_dir);
      save_checkpoint(params, cfg.checkpoint_dir / ("epoch_" + std::to_string(epoch + 1) + ".lgck"),
                      cfg.hash());
    }
  }
  return {std::move(params), std::move(history)};
}

void write_history_tsv(const TrainHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "epoch\tloss\tap\tsingle_class_pools\tclamps\n";
  out.precision(10);
  for (std::size_t e = 0; e < history.epochs(); ++e) {
    out << e + 1 << '\t' << history.mean_loss[e] << '\t' << history.holdout_ap[e] << '\t'
        << history.single_class_pools[e] << '\t' << history.clamps[e] << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace linkgcn
