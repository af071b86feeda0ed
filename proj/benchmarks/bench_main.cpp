#include <benchmark/benchmark.h>

#include "linkgcn/embedding.hpp"
#include "linkgcn/gcn.hpp"
#include "linkgcn/inference.hpp"
#include "linkgcn/knn.hpp"
#include "linkgcn/losses.hpp"
#include "linkgcn/sampling.hpp"
#include "linkgcn/subgraph.hpp"

using namespace linkgcn;

namespace {

EmbeddingSet make_set(std::size_t n, std::size_t dim) {
  SyntheticSpec s;
  s.class_sizes.assign(n / 10, 10);
  s.dim = dim;
  s.spread = 0.3;
  s.separation = 1.0;
  s.seed = 1;
  return generate_synthetic(s);
}

void BM_Knn(benchmark::State& state) {
  const EmbeddingSet set = make_set(static_cast<std::size_t>(state.range(0)), 128);
  std::size_t pivot = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(knn(set, pivot, 20));
    pivot = (pivot + 1) % set.size();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Knn)->Arg(1000)->Arg(10000);

void BM_NeighborTable(benchmark::State& state) {
  const EmbeddingSet set = make_set(static_cast<std::size_t>(state.range(0)), 128);
  for (auto _ : state) benchmark::DoNotOptimize(NeighborTable(set, 20));
}
BENCHMARK(BM_NeighborTable)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_RiwsSample(benchmark::State& state) {
  const auto pool = static_cast<std::size_t>(state.range(0));
  NeighborList list;
  std::vector<Label> labels(pool + 1);
  for (std::size_t i = 1; i <= pool; ++i) {
    list.neighbors.push_back({i, static_cast<double>(i)});
    labels[i] = static_cast<Label>(i % 5 == 0 ? 0 : 1);
  }
  Rng rng(3);
  for (auto _ : state) {
    const CandidateWeights w = riws_weights(list, labels, 0);
    benchmark::DoNotOptimize(sample_one_hop(w, pool / 2, rng));
  }
}
BENCHMARK(BM_RiwsSample)->Arg(20)->Arg(80);

void BM_ForwardBackward(benchmark::State& state) {
  const EmbeddingSet set = make_set(2000, 128);
  const NeighborTable table(set, 20);
  const ExpansionConfig cfg{10, 1.0, 5};
  const GcnParams params = init_params(128, {64, 64}, 1);
  const LossConfig loss;
  std::size_t pivot = 0;
  for (auto _ : state) {
    const Subgraph sg = build_subgraph(table, pivot, table.knn(pivot, 10).indices(), cfg, 10);
    ForwardTrace trace = forward(sg, params);
    const LossResult l = compute_loss(loss, trace.logits, sg.link_labels);
    benchmark::DoNotOptimize(backward(trace, params, l.grad));
    pivot = (pivot + 1) % set.size();
  }
}
BENCHMARK(BM_ForwardBackward);

void BM_AveragePrecision(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  std::vector<double> scores(n);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform();
    labels[i] = rng.uniform() < 0.3 ? 1 : 0;
  }
  labels[0] = 1;
  for (auto _ : state) benchmark::DoNotOptimize(average_precision(scores, labels));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AveragePrecision)->Arg(10000)->Arg(1000000);

}  // namespace

BENCHMARK_MAIN();
