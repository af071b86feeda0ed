#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "linkgcn/embedding.hpp"
#include "linkgcn/inference.hpp"
#include "linkgcn/training.hpp"

namespace linkgcn::harness {

using nlohmann::json;

/// Evaluation settings: subgraph shape at test time plus the tau grid.
struct EvalConfig {
  InferenceConfig inference;
  double tau_step = 0.05;

  std::uint64_t hash() const;
};

/// A train/eval config file: {"train": {...}, "eval": {...}}. Eval keys not
/// given fall back to the train section's k, k2 and r.
struct RunConfig {
  TrainConfig train;
  EvalConfig eval;
};

/// A table row label such as "L-GCN", "CB", "FL+RIWS".
struct MethodSpec {
  std::string name;
  StrategyKind strategy = StrategyKind::BaselineTopK;
  LossKind loss = LossKind::CrossEntropy;
};

MethodSpec parse_method(const std::string& name);

/// Where a dataset comes from: an existing manifest or a generator spec.
struct DataSource {
  std::optional<std::filesystem::path> manifest;
  std::optional<SyntheticSpec> synthetic;

  EmbeddingSet load() const;
  std::uint64_t hash() const;
};

struct ExperimentSpec {
  std::string name = "experiment";
  DataSource source;
  DataSource test;
  std::vector<std::pair<std::size_t, std::size_t>> grid;  // (m, n); empty = source as-is
  std::uint64_t subset_seed = 0;
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
  RunConfig run;
  // Expansion coefficient per sampling family; baseline always uses 1.
  double gamma_resample = 1.2;
  double gamma_riws = 2.0;

  void validate() const;
};

// JSON <-> config. Unknown keys are rejected with ConfigError.
SyntheticSpec synthetic_spec_from_json(const json& j);
json to_json(const SyntheticSpec& spec);
TrainConfig train_config_from_json(const json& j, TrainConfig base = {});
json to_json(const TrainConfig& cfg);
EvalConfig eval_config_from_json(const json& j, const TrainConfig& train, EvalConfig base = {});
json to_json(const EvalConfig& cfg);
RunConfig run_config_from_json(const json& j);
ExperimentSpec experiment_from_json(const json& j, const std::filesystem::path& base_dir);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const json& j, const std::filesystem::path& path);

/// TrainConfig for one method: strategy, loss and the method-family gamma.
TrainConfig method_train_config(const ExperimentSpec& spec, const MethodSpec& method,
                                std::uint64_t seed);

}  // namespace linkgcn::harness
