// Drives the installed command-line tool end to end.

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>
#include <sys/wait.h>

#include "linkgcn/harness/report.hpp"
#include "test_util.hpp"

using linkgcn::testing::TempDir;
using nlohmann::json;

namespace {

int run(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string(LINKGCN_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* kSynth = R"({"name": "toy", "class_sizes": [8, 8, 8, 3, 3], "dim": 8,
                         "spread": 0.3, "separation": 1.0, "seed": 2})";
const char* kRun = R"({"train": {"strategy": "riws", "k": 4, "gamma": 2.0, "k2": 2, "r": 3,
                                  "epochs": 2, "hidden": [6]}, "eval": {"tau_step": 0.1}})";

}  // namespace

TEST(Cli, SynthSubsetTrainEvalCluster) {
  TempDir dir;
  write(dir / "synth.json", kSynth);
  write(dir / "run.json", kRun);
  const auto log = dir / "log";
  ASSERT_EQ(run("synth --config " + (dir / "synth.json").string() + " --out " + (dir / "data").string(), log), 0)
      << slurp(log);
  const auto manifest = (dir / "data" / "toy.json").string();
  ASSERT_TRUE(std::filesystem::exists(manifest));

  ASSERT_EQ(run("subset --manifest " + manifest + " -m 2 -n 2 --seed 1 --out " + (dir / "sub").string(), log), 0)
      << slurp(log);
  ASSERT_EQ(run("subset --manifest " + manifest + " -m 9 -n 2 --out " + (dir / "sub").string(), log), 3);

  ASSERT_EQ(run("train --manifest " + manifest + " --config " + (dir / "run.json").string() +
                    " --seed 3 --deterministic --out " + (dir / "run").string(),
                log),
            0)
      << slurp(log);
  ASSERT_EQ(run("eval --manifest " + manifest + " --checkpoint " + (dir / "run" / "model.lgck").string() +
                    " --config " + (dir / "run.json").string() + " --method RIWS --seed 3 --deterministic --out " +
                    (dir / "run").string(),
                log),
            0)
      << slurp(log);
  const json report = json::parse(slurp(dir / "run" / "report.json"));
  EXPECT_TRUE(linkgcn::harness::validate_eval_report(report).empty());
  EXPECT_EQ(report.at("method"), "RIWS");
  EXPECT_EQ(report.at("seed"), 3);

  ASSERT_EQ(run("cluster --manifest " + manifest + " --checkpoint " + (dir / "run" / "model.lgck").string() +
                    " --config " + (dir / "run.json").string() + " --tau 0.5 --out " + (dir / "cl").string(),
                log),
            0)
      << slurp(log);
  EXPECT_TRUE(std::filesystem::exists(dir / "cl" / "clusters.tsv"));
}

TEST(Cli, ConfigErrorsExitWithThree) {
  TempDir dir;
  const auto log = dir / "log";
  write(dir / "bad.json", R"({"name": "x", "class_sizes": [3, 3], "colour": 1})");
  EXPECT_EQ(run("synth --config " + (dir / "bad.json").string() + " --out " + dir.path().string(), log), 3);
  EXPECT_EQ(run("synth --out " + dir.path().string(), log), 3);  // --config missing
  EXPECT_EQ(run("frobnicate", log), 3);
  write(dir / "notjson.json", "{ nope");
  EXPECT_EQ(run("synth --config " + (dir / "notjson.json").string(), log), 3);
}

TEST(Cli, MatrixPartialFailureExitsWithTwoAndReportReaggregates) {
  TempDir dir;
  const auto log = dir / "log";
  write(dir / "exp.json", R"({
    "source": {"synthetic": {"name": "src", "class_sizes": [10, 10, 4, 4], "dim": 8,
                             "spread": 0.3, "separation": 1.0, "seed": 1}},
    "test": {"synthetic": {"name": "test", "class_sizes": [6, 6, 6], "dim": 8,
                           "spread": 0.3, "separation": 1.0, "seed": 2}},
    "grid": [[1, 3], [2, 3]],
    "methods": ["L-GCN", "RS"],
    "seeds": [1],
    "train": {"k": 3, "k2": 2, "r": 2, "epochs": 1, "hidden": [4]}
  })");
  EXPECT_EQ(run("matrix --config " + (dir / "exp.json").string() + " --out " + (dir / "m").string(), log), 2)
      << slurp(log);
  EXPECT_TRUE(std::filesystem::exists(dir / "m" / "table.tsv"));
  EXPECT_EQ(run("report --in " + (dir / "m").string(), log), 2) << slurp(log);
  const json r = json::parse(slurp(dir / "m" / "report.json"));
  EXPECT_EQ(r.at("failed_cells"), 2);
  EXPECT_EQ(r.at("datasets").size(), 2u);
}

TEST(Cli, SweepGammaWritesOneRowPerGammaAndMethod) {
  TempDir dir;
  const auto log = dir / "log";
  write(dir / "exp.json", R"({
    "source": {"synthetic": {"name": "src", "class_sizes": [10, 10, 4, 4], "dim": 8,
                             "spread": 0.3, "separation": 1.0, "seed": 1}},
    "test": {"synthetic": {"name": "test", "class_sizes": [6, 6, 6], "dim": 8,
                           "spread": 0.3, "separation": 1.0, "seed": 2}},
    "methods": ["RIWS"],
    "seeds": [1],
    "train": {"k": 4, "k2": 2, "r": 2, "epochs": 1, "hidden": [4]}
  })");
  ASSERT_EQ(run("sweep-gamma --config " + (dir / "exp.json").string() + " --gammas 1.0,1.2,1.5,2.0,2.5 --out " +
                    (dir / "g").string(),
                log),
            0)
      << slurp(log);
  std::ifstream tsv(dir / "g" / "gamma_sweep.tsv");
  int lines = 0;
  for (std::string line; std::getline(tsv, line);) ++lines;
  EXPECT_EQ(lines, 1 + 5 * 2);
}
