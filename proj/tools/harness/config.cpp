#include "linkgcn/harness/config.hpp"

#include <fstream>
#include <set>

#include "linkgcn/error.hpp"
#include "linkgcn/hash.hpp"

namespace linkgcn::harness {

namespace {

// Reads typed keys out of a JSON object and rejects anything left over.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace

std::uint64_t EvalConfig::hash() const {
  Fnv1a h;
  h.str("eval-v1")
      .u64(inference.expansion.k)
      .f64(inference.expansion.gamma)
      .u64(inference.expansion.k2)
      .u64(inference.edge_degree)
      .str(inference.test_time_sampling ? to_string(*inference.test_time_sampling) : "none")
      .u64(inference.seed)
      .f64(tau_step);
  return h.digest();
}

MethodSpec parse_method(const std::string& name) {
  MethodSpec m;
  m.name = name;
  if (name == "L-GCN" || name == "baseline") return m;
  std::string rest = name;
  bool loss_set = false;
  bool strategy_set = false;
  while (!rest.empty()) {
    const auto plus = rest.find('+');
    const std::string part = rest.substr(0, plus);
    rest = plus == std::string::npos ? "" : rest.substr(plus + 1);
    if ((part == "CB" || part == "FL") && !loss_set) {
      m.loss = part == "CB" ? LossKind::ClassBalance : LossKind::Focal;
      loss_set = true;
    } else if ((part == "RS" || part == "RIWS") && !strategy_set) {
      m.strategy = part == "RS" ? StrategyKind::BalancedResample : StrategyKind::Riws;
      strategy_set = true;
    } else if (part == "L-GCN" && !strategy_set) {
      strategy_set = true;
    } else {
      throw ConfigError("unknown method '" + name + "' (components: L-GCN, CB, FL, RS, RIWS)");
    }
  }
  return m;
}

EmbeddingSet DataSource::load() const {
  if (manifest) return load_embeddings(*manifest);
  if (synthetic) return generate_synthetic(*synthetic);
  throw ConfigError("data source needs a 'manifest' or a 'synthetic' spec");
}

std::uint64_t DataSource::hash() const {
  Fnv1a h;
  if (manifest) {
    h.str("manifest").str(manifest->lexically_normal().generic_string());
    const Manifest m = read_manifest(*manifest);
    for (const auto& file : {m.features, m.labels}) {
      std::ifstream in(file, std::ios::binary);
      char buf[1 << 14];
      while (in.read(buf, sizeof buf) || in.gcount() > 0) h.bytes(buf, static_cast<std::size_t>(in.gcount()));
    }
  } else if (synthetic) {
    h.str("synthetic").str(to_json(*synthetic).dump());
  }
  return h.digest();
}

SyntheticSpec synthetic_spec_from_json(const json& j) {
  Reader r(j, "synthetic");
  SyntheticSpec s;
  r.get("name", s.name);
  r.get("class_sizes", s.class_sizes);
  if (r.has("groups")) {
    for (const auto& g : r.at("groups")) {
      Reader gr(g, "synthetic.groups[]");
      std::size_t count = 0;
      std::size_t size = 0;
      gr.get("count", count);
      gr.get("size", size);
      gr.finish();
      s.class_sizes.insert(s.class_sizes.end(), count, size);
    }
  }
  r.get("dim", s.dim);
  r.get("spread", s.spread);
  r.get("separation", s.separation);
  r.get("latent_dim", s.latent_dim);
  r.get("noise", s.noise);
  r.get("seed", s.seed);
  r.finish();
  s.validate();
  return s;
}

json to_json(const SyntheticSpec& spec) {
  return {{"name", spec.name},       {"class_sizes", spec.class_sizes},
          {"dim", spec.dim},         {"spread", spec.spread},
          {"separation", spec.separation}, {"latent_dim", spec.latent_dim},
          {"noise", spec.noise},           {"seed", spec.seed}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig base) {
  Reader r(j, "train");
  TrainConfig c = std::move(base);
  std::string strategy(to_string(c.strategy.kind));
  std::string loss(to_string(c.loss.kind));
  r.get("strategy", strategy);
  r.get("k", c.strategy.expansion.k);
  r.get("gamma", c.strategy.expansion.gamma);
  r.get("k2", c.strategy.expansion.k2);
  r.get("loss", loss);
  r.get("focal_alpha", c.loss.focal_alpha_pos);
  r.get("focal_gamma", c.loss.focal_gamma);
  r.get("epochs", c.epochs);
  r.get("lr", c.learning_rate);
  r.get("momentum", c.momentum);
  r.get("weight_decay", c.weight_decay);
  r.get("lr_decay", c.lr_decay);
  r.get("lr_step_epochs", c.lr_step_epochs);
  r.get("batch_size", c.batch_size);
  r.get("hidden", c.hidden);
  r.get("leaky_slope", c.leaky_slope);
  r.get("r", c.edge_degree);
  r.get("holdout_fraction", c.holdout_fraction);
  r.get("max_holdout", c.max_holdout);
  r.get("seed", c.seed);
  r.get("deterministic", c.deterministic);
  r.get("checkpoint_every", c.checkpoint_every);
  r.finish();
  c.strategy.kind = parse_strategy(strategy);
  c.loss.kind = parse_loss(loss);
  c.validate();
  return c;
}

json to_json(const TrainConfig& c) {
  return {{"strategy", to_string(c.strategy.kind)},
          {"k", c.strategy.expansion.k},
          {"gamma", c.strategy.expansion.gamma},
          {"k2", c.strategy.expansion.k2},
          {"loss", to_string(c.loss.kind)},
          {"focal_alpha", c.loss.focal_alpha_pos},
          {"focal_gamma", c.loss.focal_gamma},
          {"epochs", c.epochs},
          {"lr", c.learning_rate},
          {"momentum", c.momentum},
          {"weight_decay", c.weight_decay},
          {"lr_decay", c.lr_decay},
          {"lr_step_epochs", c.lr_step_epochs},
          {"batch_size", c.batch_size},
          {"hidden", c.hidden},
          {"leaky_slope", c.leaky_slope},
          {"r", c.edge_degree},
          {"holdout_fraction", c.holdout_fraction},
          {"max_holdout", c.max_holdout},
          {"seed", c.seed},
          {"deterministic", c.deterministic},
          {"checkpoint_every", c.checkpoint_every}};
}

EvalConfig eval_config_from_json(const json& j, const TrainConfig& train, EvalConfig base) {
  EvalConfig c = std::move(base);
  c.inference.expansion.k = train.strategy.expansion.k;
  c.inference.expansion.k2 = train.strategy.expansion.k2;
  c.inference.expansion.gamma = train.strategy.expansion.gamma;
  c.inference.edge_degree = train.edge_degree;
  if (j.is_null()) return c;
  Reader r(j, "eval");
  r.get("k", c.inference.expansion.k);
  r.get("k2", c.inference.expansion.k2);
  r.get("gamma", c.inference.expansion.gamma);
  r.get("r", c.inference.edge_degree);
  r.get("tau_step", c.tau_step);
  r.get("seed", c.inference.seed);
  if (r.has("test_time_sampling")) {
    const json& v = r.at("test_time_sampling");
    if (v.is_null()) {
      c.inference.test_time_sampling.reset();
    } else if (v.is_string()) {
      c.inference.test_time_sampling = parse_strategy(v.get<std::string>());
    } else {
      throw ConfigError("eval.test_time_sampling must be null or a strategy name");
    }
  }
  r.finish();
  c.inference.expansion.validate();
  if (c.inference.edge_degree < 1) throw ConfigError("eval.r must be >= 1");
  if (!(c.tau_step > 0.0 && c.tau_step <= 1.0)) throw ConfigError("eval.tau_step must lie in (0, 1]");
  return c;
}

json to_json(const EvalConfig& c) {
  json j = {{"k", c.inference.expansion.k},
            {"k2", c.inference.expansion.k2},
            {"gamma", c.inference.expansion.gamma},
            {"r", c.inference.edge_degree},
            {"tau_step", c.tau_step},
            {"seed", c.inference.seed}};
  j["test_time_sampling"] =
      c.inference.test_time_sampling ? json(to_string(*c.inference.test_time_sampling)) : json(nullptr);
  return j;
}

RunConfig run_config_from_json(const json& j) {
  Reader r(j, "config");
  RunConfig c;
  if (r.has("train")) c.train = train_config_from_json(r.at("train"));
  c.eval = eval_config_from_json(r.has("eval") ? r.at("eval") : json(nullptr), c.train);
  r.finish();
  return c;
}

namespace {

DataSource data_source_from_json(const json& j, const std::filesystem::path& base_dir,
                                 const std::string& where) {
  Reader r(j, where);
  DataSource s;
  if (r.has("manifest")) s.manifest = base_dir / r.at("manifest").get<std::string>();
  if (r.has("synthetic")) s.synthetic = synthetic_spec_from_json(r.at("synthetic"));
  r.finish();
  if (s.manifest.has_value() == s.synthetic.has_value()) {
    throw ConfigError(where + ": give exactly one of 'manifest' or 'synthetic'");
  }
  return s;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (methods.empty()) throw ConfigError("experiment needs at least one method");
  if (seeds.empty()) throw ConfigError("experiment needs at least one seed");
  for (const auto& m : methods) parse_method(m);
  if (!(gamma_resample >= 1.0) || !(gamma_riws >= 1.0)) throw ConfigError("gamma values must be >= 1");
}

ExperimentSpec experiment_from_json(const json& j, const std::filesystem::path& base_dir) {
  Reader r(j, "experiment");
  ExperimentSpec s;
  r.get("name", s.name);
  if (!r.has("source")) throw ConfigError("experiment needs a 'source' dataset");
  s.source = data_source_from_json(r.at("source"), base_dir, "source");
  if (!r.has("test")) throw ConfigError("experiment needs a 'test' dataset");
  s.test = data_source_from_json(r.at("test"), base_dir, "test");
  if (r.has("grid")) {
    for (const auto& cell : r.at("grid")) {
      if (!cell.is_array() || cell.size() != 2) throw ConfigError("grid entries must be [m, n] pairs");
      s.grid.emplace_back(cell[0].get<std::size_t>(), cell[1].get<std::size_t>());
    }
  }
  r.get("subset_seed", s.subset_seed);
  r.get("methods", s.methods);
  r.get("seeds", s.seeds);
  r.get("gamma_resample", s.gamma_resample);
  r.get("gamma_riws", s.gamma_riws);
  if (r.has("train")) s.run.train = train_config_from_json(r.at("train"));
  s.run.eval = eval_config_from_json(r.has("eval") ? r.at("eval") : json(nullptr), s.run.train);
  r.finish();
  s.validate();
  return s;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

TrainConfig method_train_config(const ExperimentSpec& spec, const MethodSpec& method,
                                std::uint64_t seed) {
  TrainConfig c = spec.run.train;
  c.strategy.kind = method.strategy;
  c.loss.kind = method.loss;
  c.seed = seed;
  switch (method.strategy) {
    case StrategyKind::BaselineTopK:
      c.strategy.expansion.gamma = 1.0;
      break;
    case StrategyKind::BalancedResample:
      c.strategy.expansion.gamma = spec.gamma_resample;
      break;
    case StrategyKind::Riws:
      c.strategy.expansion.gamma = spec.gamma_riws;
      break;
  }
  return c;
}

}  // namespace linkgcn::harness
