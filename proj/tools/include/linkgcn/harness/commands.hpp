#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "linkgcn/harness/config.hpp"

namespace linkgcn::harness {

/// Exit codes of the command-line tool.
enum ExitCode : int { kSuccess = 0, kFailure = 1, kPartialFailure = 2, kConfigError = 3 };

/// Labels written into an evaluation report.
struct RunMeta {
  std::string dataset;
  std::string method;
  std::uint64_t seed = 0;
  bool deterministic = true;  // report runtime_s as 0 so reruns are byte-identical
  std::size_t train_single_class_pools = 0;
  std::size_t train_clamps = 0;
};

struct TrainOutput {
  std::filesystem::path checkpoint;
  std::filesystem::path history;
  std::uint64_t config_hash = 0;
  TrainHistory summary;
};

/// Generates a synthetic dataset from a SyntheticSpec JSON file.
Manifest cmd_synth(const std::filesystem::path& spec_file, const std::filesystem::path& out_dir);
Manifest cmd_synth(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

/// Path of the manifest save_embeddings wrote for `m`.
std::filesystem::path manifest_path(const Manifest& m);

/// Writes the (m, n) subset of a dataset.
Manifest cmd_subset(const std::filesystem::path& manifest, const SynthesisSpec& spec,
                    const std::filesystem::path& out_dir);

/// Trains and writes model.lgck, history.tsv and train_config.json to out_dir.
TrainOutput cmd_train(const std::filesystem::path& manifest, const TrainConfig& cfg,
                      const std::filesystem::path& out_dir);

/// Scores edges, computes AP and the tau-swept BCubed F. Writes report.json
/// and scores.tsv to out_dir and returns the report.
json cmd_eval(const std::filesystem::path& manifest, const std::filesystem::path& checkpoint,
              const EvalConfig& cfg, const RunMeta& meta, const std::filesystem::path& out_dir);

/// Scores edges and merges them at a fixed tau; writes clusters.tsv.
Clustering cmd_cluster(const std::filesystem::path& manifest, const std::filesystem::path& checkpoint,
                       const EvalConfig& cfg, double tau, const std::filesystem::path& out_path);

struct MatrixResult {
  json report;
  std::size_t failed_cells = 0;
};

/// Method x dataset x seed grid. Cells whose result file already carries the
/// same config hash are reused. Writes report.json and table.tsv.
MatrixResult cmd_matrix(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                        bool deterministic = true);

struct SweepRow {
  double gamma = 1.0;
  std::string method;
  std::vector<double> ap;  // one per (dataset, seed) cell that succeeded
  double mean_ap = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t failed_cells = 0;
};

/// Trains/evaluates RS and RIWS for each gamma. Writes gamma_sweep.tsv and a
/// plot-ready gamma_sweep.dat (gamma, rs, riws).
SweepResult cmd_sweep_gamma(const ExperimentSpec& spec, const std::vector<double>& gammas,
                            const std::filesystem::path& out_dir, bool deterministic = true);

/// Re-aggregates the cell files of a matrix run into report.json / table.tsv.
json cmd_report(const std::filesystem::path& matrix_dir);

}  // namespace linkgcn::harness
