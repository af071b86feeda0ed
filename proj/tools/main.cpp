#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linkgcn/error.hpp"
#include "linkgcn/harness/commands.hpp"
#include "linkgcn/harness/config.hpp"

namespace fs = std::filesystem;
using namespace linkgcn;
using namespace linkgcn::harness;

namespace {

struct Options {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out = ".";
  bool deterministic = false;
  unsigned threads = 1;
  std::string manifest;
  std::string checkpoint;
  std::string method;
  std::string in;
  std::size_t m = 0;
  std::size_t n = 1;
  double tau = 0.5;
  std::vector<double> gammas{1.0, 1.2, 1.5, 2.0};
};

void add_common(CLI::App* cmd, Options& o, bool needs_config) {
  cmd->add_option("--seed", o.seed, "Random seed (overrides the config)");
  auto* cfg = cmd->add_option("--config", o.config, "JSON config file");
  if (needs_config) cfg->required();
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_flag("--deterministic", o.deterministic,
                "Fixed-order reductions; reports omit wall-clock runtime");
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

RunConfig load_run_config(const Options& o) {
  RunConfig rc = o.config.empty() ? run_config_from_json(json::object()) : run_config_from_json(read_json_file(o.config));
  if (o.seed) rc.train.seed = *o.seed;
  if (o.deterministic) rc.train.deterministic = true;
  rc.train.threads = o.threads;
  rc.eval.inference.threads = o.threads;
  return rc;
}

ExperimentSpec load_experiment(const Options& o) {
  ExperimentSpec spec = experiment_from_json(read_json_file(o.config), fs::path(o.config).parent_path());
  if (o.seed) spec.seeds = {*o.seed};
  spec.run.train.threads = o.threads;
  spec.run.eval.inference.threads = o.threads;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linkgcn: GCN linkage prediction for clustering on imbalanced data"};
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic embedding set from a spec");
  add_common(synth, o, true);

  auto* subset = app.add_subcommand("subset", "Build an (m, n) imbalanced subset");
  add_common(subset, o, false);
  subset->add_option("--manifest", o.manifest, "Source dataset manifest")->required();
  subset->add_option("-m,--majority", o.m, "Identities kept whole")->required();
  subset->add_option("-n,--minority-size", o.n, "Samples kept per remaining identity")->required();

  auto* train_cmd = app.add_subcommand("train", "Train a model");
  add_common(train_cmd, o, false);
  train_cmd->add_option("--manifest", o.manifest, "Training dataset manifest")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Edge AP plus tau-swept BCubed F");
  add_common(eval_cmd, o, false);
  eval_cmd->add_option("--manifest", o.manifest, "Evaluation dataset manifest")->required();
  eval_cmd->add_option("--checkpoint", o.checkpoint, "Model checkpoint")->required();
  eval_cmd->add_option("--method", o.method, "Method label for the report");

  auto* cluster_cmd = app.add_subcommand("cluster", "Cluster by merging links above tau");
  add_common(cluster_cmd, o, false);
  cluster_cmd->add_option("--manifest", o.manifest, "Dataset manifest")->required();
  cluster_cmd->add_option("--checkpoint", o.checkpoint, "Model checkpoint")->required();
  cluster_cmd->add_option("--tau", o.tau, "Link threshold")->check(CLI::Range(0.0, 1.0));

  auto* matrix_cmd = app.add_subcommand("matrix", "Run the method x dataset x seed grid");
  add_common(matrix_cmd, o, true);

  auto* sweep_cmd = app.add_subcommand("sweep-gamma", "AP versus expansion coefficient for RS and RIWS");
  add_common(sweep_cmd, o, true);
  sweep_cmd->add_option("--gammas", o.gammas, "Expansion coefficients")->delimiter(',');

  auto* report_cmd = app.add_subcommand("report", "Re-aggregate a matrix output directory");
  add_common(report_cmd, o, false);
  report_cmd->add_option("--in", o.in, "Matrix output directory (defaults to --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (synth->parsed()) {
      SyntheticSpec spec = synthetic_spec_from_json(read_json_file(o.config));
      if (o.seed) spec.seed = *o.seed;
      std::cout << manifest_path(cmd_synth(spec, o.out)).string() << "\n";
    } else if (subset->parsed()) {
      const Manifest m = cmd_subset(o.manifest, {o.m, o.n, o.seed.value_or(0)}, o.out);
      std::cout << manifest_path(m).string() << "\n";
    } else if (train_cmd->parsed()) {
      const RunConfig rc = load_run_config(o);
      const TrainOutput out = cmd_train(o.manifest, rc.train, o.out);
      std::cout << out.checkpoint.string() << "\n";
    } else if (eval_cmd->parsed()) {
      RunConfig rc = load_run_config(o);
      if (o.seed) rc.eval.inference.seed = *o.seed;
      RunMeta meta;
      meta.method = o.method.empty() ? std::string(to_string(rc.train.strategy.kind)) + "+" +
                                           std::string(to_string(rc.train.loss.kind))
                                     : o.method;
      meta.seed = o.seed.value_or(rc.train.seed);
      meta.deterministic = o.deterministic;
      const json report = cmd_eval(o.manifest, o.checkpoint, rc.eval, meta, o.out);
      std::cout << report.dump(2) << "\n";
    } else if (cluster_cmd->parsed()) {
      const RunConfig rc = load_run_config(o);
      const Clustering c = cmd_cluster(o.manifest, o.checkpoint, rc.eval, o.tau,
                                       fs::path(o.out) / "clusters.tsv");
      std::cout << c.cluster_count << " clusters\n";
    } else if (matrix_cmd->parsed()) {
      const ExperimentSpec spec = load_experiment(o);
      const MatrixResult r = cmd_matrix(spec, o.out, true);
      std::cout << (fs::path(o.out) / "table.tsv").string() << "\n";
      return r.failed_cells > 0 ? kPartialFailure : kSuccess;
    } else if (sweep_cmd->parsed()) {
      const ExperimentSpec spec = load_experiment(o);
      const SweepResult r = cmd_sweep_gamma(spec, o.gammas, o.out, true);
      std::cout << (fs::path(o.out) / "gamma_sweep.tsv").string() << "\n";
      return r.failed_cells > 0 ? kPartialFailure : kSuccess;
    } else if (report_cmd->parsed()) {
      const json report = cmd_report(o.in.empty() ? o.out : o.in);
      std::cout << report.at("failed_cells").get<std::size_t>() << " failed cells\n";
      return report.at("failed_cells").get<std::size_t>() > 0 ? kPartialFailure : kSuccess;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kSuccess;
}
