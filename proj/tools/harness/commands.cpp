#include "linkgcn/harness/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "linkgcn/error.hpp"
#include "linkgcn/hash.hpp"
#include "linkgcn/harness/report.hpp"

namespace linkgcn::harness {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t params_hash(const GcnParams& params) {
  Fnv1a h;
  h.u64(params.architecture().hash());
  const auto& v = params.values();
  for (Eigen::Index i = 0; i < v.size(); ++i) h.f64(v[i]);
  return h.digest();
}

std::string safe_name(const std::string& s) {
  std::string out;
  for (const char c : s) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  }
  return out;
}

// Shared by cmd_eval and the matrix / sweep cells.
json evaluate(const EmbeddingSet& test, const GcnParams& params, std::uint64_t model_hash,
              const EvalConfig& cfg, const RunMeta& meta, double train_seconds,
              EdgeScoreSet* scores_out = nullptr) {
  const auto start = Clock::now();
  EdgeScoreSet scores = score_edges(test, params, cfg.inference);
  const double ap = average_precision(scores);
  const std::vector<double> taus = tau_grid(cfg.tau_step);
  const ThresholdSweep sweep = sweep_threshold(scores, test.labels(), taus);

  std::size_t positives = 0;
  for (const auto& e : scores.edges) positives += e.label == 1;

  Fnv1a h;
  h.str("eval-report-v1").u64(model_hash).u64(cfg.hash()).str(test.name()).u64(test.size());

  json curve = json::array();
  for (std::size_t i = 0; i < sweep.taus.size(); ++i) {
    curve.push_back({{"tau", sweep.taus[i]},
                     {"p", sweep.results[i].precision},
                     {"r", sweep.results[i].recall},
                     {"f", sweep.results[i].f},
                     {"clusters", sweep.cluster_counts[i]}});
  }
  const BCubed& best = sweep.best_result();
  const double runtime = meta.deterministic ? 0.0 : train_seconds + seconds_since(start);
  json report = {
      {"dataset", meta.dataset},
      {"method", meta.method},
      {"seed", meta.seed},
      {"ap", ap},
      {"bcubed", {{"p", best.precision}, {"r", best.recall}, {"f", best.f}, {"tau", sweep.best_tau()}}},
      {"runtime_s", runtime},
      {"degeneracy",
       {{"single_class_pools", meta.train_single_class_pools + scores.single_class_pools},
        {"clamps", meta.train_clamps + scores.clamps}}},
      {"config_hash", hex64(h.digest())},
      {"edges", scores.edges.size()},
      {"positive_fraction",
       scores.edges.empty() ? 0.0 : static_cast<double>(positives) / static_cast<double>(scores.edges.size())},
      {"clusters", sweep.cluster_counts[sweep.best]},
      {"tau_sweep", curve},
  };
  if (scores_out) *scores_out = std::move(scores);
  return report;
}

struct Dataset {
  std::string name;
  EmbeddingSet set;
  std::uint64_t hash;
};

std::vector<Dataset> build_datasets(const ExperimentSpec& spec) {
  const EmbeddingSet source = spec.source.load();
  const std::uint64_t source_hash = spec.source.hash();
  std::vector<Dataset> out;
  if (spec.grid.empty()) {
    out.push_back({source.name(), source, source_hash});
    return out;
  }
  for (const auto& [m, n] : spec.grid) {
    EmbeddingSet subset = build_imbalanced_subset(source, {m, n, spec.subset_seed});
    const std::string name = "(" + std::to_string(m) + "," + std::to_string(n) + ")";
    subset.set_name(name);
    Fnv1a h;
    h.u64(source_hash).u64(m).u64(n).u64(spec.subset_seed);
    out.push_back({name, std::move(subset), h.digest()});
  }
  return out;
}

std::size_t sum(const std::vector<std::size_t>& v) {
  std::size_t s = 0;
  for (const std::size_t x : v) s += x;
  return s;
}

std::string cell_hash_of(const Dataset& ds, std::uint64_t test_hash, const MethodSpec& method,
                         const TrainConfig& cfg, const EvalConfig& eval) {
  Fnv1a h;
  h.str("cell-v1").u64(ds.hash).u64(test_hash).u64(cfg.hash()).u64(eval.hash()).str(method.name);
  return hex64(h.digest());
}

// Trains and evaluates one grid cell; failures become a status:"failed" cell.
json run_cell(const Dataset& ds, const EmbeddingSet& test, std::uint64_t test_hash,
              const MethodSpec& method, const TrainConfig& cfg, const EvalConfig& eval,
              std::uint64_t seed) {
  const std::string cell_hash = cell_hash_of(ds, test_hash, method, cfg, eval);
  try {
    const auto start = Clock::now();
    TrainResult trained = train(ds.set, cfg);
    RunMeta meta{ds.name, method.name, seed, false, sum(trained.history.single_class_pools),
                 sum(trained.history.clamps)};
    json report = evaluate(test, trained.params, params_hash(trained.params), eval, meta, seconds_since(start));
    report["status"] = "ok";
    report["cell_hash"] = cell_hash;
    report["final_train_loss"] = trained.history.mean_loss.back();
    return report;
  } catch (const std::exception& e) {
    return {{"dataset", ds.name}, {"method", method.name}, {"seed", seed},
            {"status", "failed"}, {"error", e.what()},      {"cell_hash", cell_hash}};
  }
}

}  // namespace

fs::path manifest_path(const Manifest& m) {
  fs::path p = m.features;
  return p.replace_extension(".json");
}

Manifest cmd_synth(const fs::path& spec_file, const fs::path& out_dir) {
  return cmd_synth(synthetic_spec_from_json(read_json_file(spec_file)), out_dir);
}

Manifest cmd_synth(const SyntheticSpec& spec, const fs::path& out_dir) {
  const EmbeddingSet set = generate_synthetic(spec);
  fs::create_directories(out_dir);
  return save_embeddings(set, out_dir / (safe_name(spec.name) + ".json"));
}

Manifest cmd_subset(const fs::path& manifest, const SynthesisSpec& spec, const fs::path& out_dir) {
  const EmbeddingSet source = load_embeddings(manifest);
  const EmbeddingSet subset = build_imbalanced_subset(source, spec);
  fs::create_directories(out_dir);
  return save_embeddings(subset, out_dir / (safe_name(subset.name()) + ".json"));
}

TrainOutput cmd_train(const fs::path& manifest, const TrainConfig& cfg, const fs::path& out_dir) {
  const EmbeddingSet set = load_embeddings(manifest);
  fs::create_directories(out_dir);
  TrainOutput out;
  out.config_hash = cfg.hash();
  out.checkpoint = out_dir / "model.lgck";
  out.history = out_dir / "history.tsv";
  try {
    TrainResult result = train(set, cfg);
    save_checkpoint(result.params, out.checkpoint, out.config_hash);
    write_history_tsv(result.history, out.history);
    out.summary = std::move(result.history);
  } catch (const TrainingDiverged& e) {
    save_checkpoint(e.last_good(), out_dir / "last_good.lgck", out.config_hash);
    write_history_tsv(e.history(), out.history);
    throw;
  }
  json meta = {{"dataset", set.name()},
               {"config_hash", hex64(out.config_hash)},
               {"train", to_json(cfg)},
               {"degeneracy",
                {{"single_class_pools", sum(out.summary.single_class_pools)},
                 {"clamps", sum(out.summary.clamps)}}}};
  write_json_file(meta, out_dir / "train_config.json");
  return out;
}

json cmd_eval(const fs::path& manifest, const fs::path& checkpoint, const EvalConfig& cfg,
              const RunMeta& meta, const fs::path& out_dir) {
  const EmbeddingSet set = load_embeddings(manifest);
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  check_input_dim(ckpt.params, set.dim());
  RunMeta m = meta;
  if (m.dataset.empty()) m.dataset = set.name();
  EdgeScoreSet scores;
  json report = evaluate(set, ckpt.params, params_hash(ckpt.params) ^ ckpt.config_hash, cfg, m, 0.0, &scores);
  fs::create_directories(out_dir);
  write_json_file(report, out_dir / "report.json");
  write_scores_tsv(scores, out_dir / "scores.tsv");
  return report;
}

Clustering cmd_cluster(const fs::path& manifest, const fs::path& checkpoint, const EvalConfig& cfg,
                       double tau, const fs::path& out_path) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  const EmbeddingSet set = load_embeddings(manifest);
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const EdgeScoreSet scores = score_edges(set, ckpt.params, cfg.inference);
  Clustering clusters = merge_links(scores, tau, set.size());
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_clustering_tsv(clusters, out_path);
  return clusters;
}

MatrixResult cmd_matrix(const ExperimentSpec& spec, const fs::path& out_dir, bool deterministic) {
  spec.validate();
  const std::vector<Dataset> datasets = build_datasets(spec);
  const EmbeddingSet test = spec.test.load();
  const std::uint64_t test_hash = spec.test.hash();
  fs::create_directories(out_dir / "cells");

  std::vector<json> cells;
  std::size_t index = 0;
  for (const auto& ds : datasets) {
    for (const auto& method_name : spec.methods) {
      const MethodSpec method = parse_method(method_name);
      for (const std::uint64_t seed : spec.seeds) {
        TrainConfig cfg = method_train_config(spec, method, seed);
        cfg.deterministic = deterministic;
        const fs::path cell_path = out_dir / "cells" /
                                   (std::to_string(index) + "_" + safe_name(ds.name) + "__" +
                                    safe_name(method.name) + "__s" + std::to_string(seed) + ".json");
        json cell;
        bool reused = false;
        const std::string expected_hash = cell_hash_of(ds, test_hash, method, cfg, spec.run.eval);
        if (fs::exists(cell_path)) {
          try {
            json previous = read_json_file(cell_path);
            if (previous.value("status", "") == "ok" && previous.value("cell_hash", "") == expected_hash) {
              cell = std::move(previous);
              reused = true;
            }
          } catch (const Error&) {
            // unreadable cell file: recompute
          }
        }
        if (!reused) {
          cell = run_cell(ds, test, test_hash, method, cfg, spec.run.eval, seed);
          cell["cell_index"] = index;
          write_json_file(cell, cell_path);
        }
        std::cerr << "[matrix] " << ds.name << " " << method.name << " seed=" << seed << " -> "
                  << (cell.value("status", "") == "ok" ? "ap=" + std::to_string(cell.at("ap").get<double>())
                                                        : "FAILED: " + cell.value("error", ""))
                  << (reused ? " (cached)" : "") << "\n";
        cells.push_back(std::move(cell));
        ++index;
      }
    }
  }
  MatrixResult result;
  result.report = aggregate_cells(cells);
  result.report["name"] = spec.name;
  result.failed_cells = result.report.at("failed_cells").get<std::size_t>();
  write_json_file(result.report, out_dir / "report.json");
  std::ofstream(out_dir / "table.tsv") << render_table_tsv(result.report);
  return result;
}

SweepResult cmd_sweep_gamma(const ExperimentSpec& spec, const std::vector<double>& gammas,
                            const fs::path& out_dir, bool deterministic) {
  if (gammas.empty()) throw ConfigError("sweep-gamma needs at least one gamma");
  for (const double g : gammas) {
    if (!(g >= 1.0)) throw ConfigError("gamma values must be >= 1");
  }
  if (spec.seeds.empty()) throw ConfigError("sweep-gamma needs at least one seed");
  const std::vector<Dataset> datasets = build_datasets(spec);
  const EmbeddingSet test = spec.test.load();
  const std::uint64_t test_hash = spec.test.hash();
  fs::create_directories(out_dir);

  SweepResult result;
  for (const double gamma : gammas) {
    for (const char* method_name : {"RS", "RIWS"}) {
      const MethodSpec method = parse_method(method_name);
      SweepRow row;
      row.gamma = gamma;
      row.method = method.name;
      for (const auto& ds : datasets) {
        for (const std::uint64_t seed : spec.seeds) {
          TrainConfig cfg = method_train_config(spec, method, seed);
          cfg.strategy.expansion.gamma = gamma;
          cfg.deterministic = deterministic;
          const json cell = run_cell(ds, test, test_hash, method, cfg, spec.run.eval, seed);
          if (cell.value("status", "") == "ok") {
            row.ap.push_back(cell.at("ap").get<double>());
          } else {
            ++result.failed_cells;
            std::cerr << "[sweep] gamma=" << gamma << " " << method.name << " failed: "
                      << cell.value("error", "") << "\n";
          }
        }
      }
      double s = 0.0;
      for (const double v : row.ap) s += v;
      row.mean_ap = row.ap.empty() ? std::nan("") : s / static_cast<double>(row.ap.size());
      std::cerr << "[sweep] gamma=" << gamma << " " << method.name << " mean_ap=" << row.mean_ap << "\n";
      result.rows.push_back(std::move(row));
    }
  }

  std::ofstream tsv(out_dir / "gamma_sweep.tsv");
  tsv << "gamma\tmethod\tmean_ap\tcells\tap_values\n";
  tsv.precision(10);
  for (const auto& row : result.rows) {
    tsv << row.gamma << '\t' << row.method << '\t' << row.mean_ap << '\t' << row.ap.size() << '\t';
    for (std::size_t i = 0; i < row.ap.size(); ++i) tsv << (i ? "," : "") << row.ap[i];
    tsv << '\n';
  }
  std::ofstream dat(out_dir / "gamma_sweep.dat");
  dat << "# gamma\tresample_ap\triws_ap\n";
  dat.precision(10);
  for (std::size_t i = 0; i + 1 < result.rows.size(); i += 2) {
    dat << result.rows[i].gamma << '\t' << result.rows[i].mean_ap << '\t' << result.rows[i + 1].mean_ap << '\n';
  }
  return result;
}

json cmd_report(const fs::path& matrix_dir) {
  const fs::path cells_dir = matrix_dir / "cells";
  if (!fs::is_directory(cells_dir)) throw ConfigError("no cells directory under " + matrix_dir.string());
  std::vector<json> cells;
  for (const auto& entry : fs::directory_iterator(cells_dir)) {
    if (entry.path().extension() == ".json") cells.push_back(read_json_file(entry.path()));
  }
  std::sort(cells.begin(), cells.end(), [](const json& a, const json& b) {
    return a.value("cell_index", std::size_t{0}) < b.value("cell_index", std::size_t{0});
  });
  json report = aggregate_cells(cells);
  write_json_file(report, matrix_dir / "report.json");
  std::ofstream(matrix_dir / "table.tsv") << render_table_tsv(report);
  return report;
}

}  // namespace linkgcn::harness
