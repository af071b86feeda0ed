#include "linkgcn/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "binary_io.hpp"
#include "linkgcn/error.hpp"
#include "linkgcn/random.hpp"

namespace linkgcn {

namespace {

constexpr char kFeatureMagic[4] = {'L', 'B', 'E', 'M'};
constexpr std::uint32_t kFeatureVersion = 1;
// Rows already this close to unit length are left bit-for-bit untouched so that
// save/load round trips are exact.
constexpr double kUnitTolerance = 1e-6;

void normalize_rows(FeatureMatrix& features) {
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    double sq = 0.0;
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      const double v = features(i, j);
      sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (norm == 0.0) {
      throw ConfigError("row " + std::to_string(i) + " has zero norm and cannot be normalized");
    }
    if (std::abs(norm - 1.0) <= kUnitTolerance) continue;
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      features(i, j) = static_cast<float>(features(i, j) / norm);
    }
  }
}

void check_finite(const FeatureMatrix& features) {
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      if (!std::isfinite(features(i, j))) {
        throw LoadError("non-finite feature value at row " + std::to_string(i) + ", column " +
                        std::to_string(j));
      }
    }
  }
}

}  // namespace

EmbeddingSet::EmbeddingSet(FeatureMatrix features, std::span<const std::int64_t> labels,
                           std::string name, Normalize normalize)
    : features_(std::move(features)), name_(std::move(name)) {
  if (features_.rows() < 2) throw ConfigError("an embedding set needs at least 2 rows");
  if (features_.cols() < 1) throw ConfigError("an embedding set needs dimension >= 1");
  if (labels.size() != static_cast<std::size_t>(features_.rows())) {
    throw LoadError("label count " + std::to_string(labels.size()) + " does not match row count " +
                    std::to_string(features_.rows()));
  }
  check_finite(features_);
  if (normalize == Normalize::Yes) normalize_rows(features_);

  original_labels_.assign(labels.begin(), labels.end());
  std::sort(original_labels_.begin(), original_labels_.end());
  original_labels_.erase(std::unique(original_labels_.begin(), original_labels_.end()),
                         original_labels_.end());
  labels_.reserve(labels.size());
  for (const std::int64_t raw : labels) {
    const auto it = std::lower_bound(original_labels_.begin(), original_labels_.end(), raw);
    labels_.push_back(static_cast<Label>(it - original_labels_.begin()));
  }
}

std::vector<std::size_t> EmbeddingSet::class_sizes() const {
  std::vector<std::size_t> sizes(class_count(), 0);
  for (const Label l : labels_) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

void SyntheticSpec::validate() const {
  if (class_sizes.empty()) throw ConfigError("synthetic spec needs at least one class");
  for (const std::size_t s : class_sizes) {
    if (s < 1) throw ConfigError("synthetic class sizes must be >= 1");
  }
  if (dim < 1) throw ConfigError("synthetic dimension must be >= 1");
  if (!std::isfinite(spread) || spread <= 0.0) throw ConfigError("spread must be finite and > 0");
  if (!std::isfinite(separation) || separation <= 0.0) {
    throw ConfigError("separation must be finite and > 0");
  }
  if (latent_dim > dim) throw ConfigError("latent_dim must not exceed dim");
  if (!std::isfinite(noise) || noise < 0.0) throw ConfigError("noise must be finite and >= 0");
  if (std::accumulate(class_sizes.begin(), class_sizes.end(), std::size_t{0}) < 2) {
    throw ConfigError("synthetic spec must produce at least 2 rows");
  }
}

EmbeddingSet generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t classes = spec.class_sizes.size();
  const auto d = static_cast<Eigen::Index>(spec.dim);
  Rng rng(spec.seed);

  // Centers: isotropic Gaussian proposals with std-dev `separation`, rejected
  // while closer than `separation` to an accepted center. The proposal scale
  // grows if rejection keeps failing (tiny d, many classes).
  Eigen::MatrixXd centers(static_cast<Eigen::Index>(classes), d);
  double scale = spec.separation;
  for (std::size_t c = 0; c < classes; ++c) {
    int attempts = 0;
    while (true) {
      Eigen::VectorXd candidate(d);
      for (Eigen::Index j = 0; j < d; ++j) candidate[j] = scale * rng.normal();
      bool ok = true;
      for (std::size_t prev = 0; prev < c && ok; ++prev) {
        ok = (centers.row(static_cast<Eigen::Index>(prev)).transpose() - candidate).norm() >=
             spec.separation;
      }
      if (ok) {
        centers.row(static_cast<Eigen::Index>(c)) = candidate.transpose();
        break;
      }
      if (++attempts % 256 == 0) scale *= 1.5;
    }
  }

  const std::size_t n = std::accumulate(spec.class_sizes.begin(), spec.class_sizes.end(),
                                        std::size_t{0});
  FeatureMatrix features(static_cast<Eigen::Index>(n), d);
  std::vector<std::int64_t> labels;
  labels.reserve(n);
  const auto q = static_cast<Eigen::Index>(spec.latent_dim);
  Eigen::Index row = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    Eigen::MatrixXd basis(d, q);
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index a = 0; a < q; ++a) basis(j, a) = rng.normal() / std::sqrt(static_cast<double>(d));
    }
    for (std::size_t s = 0; s < spec.class_sizes[c]; ++s, ++row) {
      Eigen::VectorXd x = centers.row(static_cast<Eigen::Index>(c)).transpose();
      if (q == 0) {
        for (Eigen::Index j = 0; j < d; ++j) x[j] += spec.spread * rng.normal();
      } else {
        Eigen::VectorXd z(q);
        for (Eigen::Index a = 0; a < q; ++a) z[a] = rng.normal();
        x += spec.spread * (basis * z);
        for (Eigen::Index j = 0; j < d; ++j) x[j] += spec.noise * rng.normal();
      }
      x /= x.norm();
      for (Eigen::Index j = 0; j < d; ++j) features(row, j) = static_cast<float>(x[j]);
      labels.push_back(static_cast<std::int64_t>(c));
    }
  }
  return EmbeddingSet(std::move(features), labels, spec.name);
}

EmbeddingSet select_rows(const EmbeddingSet& set, std::span<const std::size_t> rows,
                         std::string name) {
  FeatureMatrix features(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(set.dim()));
  std::vector<std::int64_t> labels;
  labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= set.size()) throw ConfigError("row index out of range in select_rows");
    features.row(static_cast<Eigen::Index>(i)) = set.features().row(static_cast<Eigen::Index>(rows[i]));
    labels.push_back(set.original_labels()[static_cast<std::size_t>(set.label(rows[i]))]);
  }
  // Source rows are already unit length; skip re-normalization so values stay
  // bit-identical (raw fixtures also keep their raw values).
  return EmbeddingSet(std::move(features), labels, std::move(name), EmbeddingSet::Normalize::No);
}

EmbeddingSet build_imbalanced_subset(const EmbeddingSet& set, const SynthesisSpec& spec) {
  const std::size_t classes = set.class_count();
  if (spec.majority_identity_count > classes) {
    throw ConfigError("majority_identity_count m=" + std::to_string(spec.majority_identity_count) +
                      " exceeds class count C=" + std::to_string(classes));
  }
  if (spec.minority_identity_size < 1) throw ConfigError("minority_identity_size n must be >= 1");

  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t i = 0; i < set.size(); ++i) {
    members[static_cast<std::size_t>(set.label(i))].push_back(i);
  }
  std::vector<std::size_t> order(classes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Dense ids follow ascending original ids, so this tie-break is by original id.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return members[a].size() > members[b].size();
  });

  Rng rng(spec.seed);
  std::vector<std::size_t> keep;
  keep.reserve(set.size());
  for (std::size_t rank = 0; rank < classes; ++rank) {
    auto& rows = members[order[rank]];
    if (rank < spec.majority_identity_count || rows.size() <= spec.minority_identity_size) {
      keep.insert(keep.end(), rows.begin(), rows.end());
      continue;
    }
    // Partial Fisher-Yates: uniform n-subset without replacement.
    for (std::size_t i = 0; i < spec.minority_identity_size; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(rows.size() - i));
      std::swap(rows[i], rows[j]);
    }
    keep.insert(keep.end(), rows.begin(),
                rows.begin() + static_cast<std::ptrdiff_t>(spec.minority_identity_size));
  }
  std::sort(keep.begin(), keep.end());
  std::ostringstream name;
  name << set.name() << "_m" << spec.majority_identity_count << "_n"
       << spec.minority_identity_size;
  return select_rows(set, keep, name.str());
}

// ---------------------------------------------------------------------------

void write_feature_file(const FeatureMatrix& features, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kFeatureMagic, 4);
  detail::write_le<std::uint32_t>(out, kFeatureVersion);
  detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(features.rows()));
  detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(features.cols()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) detail::write_le<float>(out, features(i, j));
  }
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

FeatureMatrix read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open feature file " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || !std::equal(magic, magic + 4, kFeatureMagic)) {
    throw LoadError("bad magic in " + path.string() + " (expected LBEM)");
  }
  const auto version = detail::read_le<std::uint32_t>(in, "version");
  if (version != kFeatureVersion) {
    throw LoadError("unsupported feature file version " + std::to_string(version));
  }
  const auto rows = detail::read_le<std::uint64_t>(in, "row count");
  const auto cols = detail::read_le<std::uint64_t>(in, "column count");
  const auto start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto payload = static_cast<std::uint64_t>(in.tellg() - start);
  in.seekg(start);
  if (cols == 0 || rows > payload / (cols * sizeof(float)) || payload != rows * cols * sizeof(float)) {
    throw LoadError("size mismatch in " + path.string() + ": header says " + std::to_string(rows) +
                    "x" + std::to_string(cols) + " but payload has " + std::to_string(payload) +
                    " bytes");
  }
  FeatureMatrix features(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      features(i, j) = detail::read_le<float>(in, "feature payload");
    }
  }
  return features;
}

EmbeddingSet load_embeddings(const std::filesystem::path& features_path,
                             const std::filesystem::path& labels_path, std::string name) {
  FeatureMatrix features = read_feature_file(features_path);
  check_finite(features);

  std::ifstream in(labels_path);
  if (!in) throw LoadError("cannot open label file " + labels_path.string());
  std::vector<std::int64_t> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t used = 0;
    std::int64_t value = 0;
    try {
      value = std::stoll(line, &used, 10);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size() || used == 0) {
      throw LoadError("label file " + labels_path.string() + " line " + std::to_string(line_no) +
                      " is not an integer");
    }
    labels.push_back(value);
  }
  if (labels.size() != static_cast<std::size_t>(features.rows())) {
    throw LoadError("size mismatch: " + std::to_string(features.rows()) + " feature rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  return EmbeddingSet(std::move(features), labels, std::move(name));
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("features") || !j.contains("labels")) {
    throw LoadError("manifest " + path.string() + " needs 'features' and 'labels'");
  }
  const auto base = path.parent_path();
  Manifest m;
  m.features = base / j.at("features").get<std::string>();
  m.labels = base / j.at("labels").get<std::string>();
  m.name = j.value("name", path.stem().string());
  return m;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  const auto base = path.parent_path();
  nlohmann::json j;
  j["features"] = std::filesystem::relative(manifest.features, base.empty() ? "." : base).generic_string();
  j["labels"] = std::filesystem::relative(manifest.labels, base.empty() ? "." : base).generic_string();
  j["name"] = manifest.name;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

EmbeddingSet load_embeddings(const std::filesystem::path& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  return load_embeddings(m.features, m.labels, m.name);
}

Manifest save_embeddings(const EmbeddingSet& set, const std::filesystem::path& manifest_path) {
  Manifest m;
  auto stem = manifest_path;
  m.features = stem.replace_extension(".lbem");
  m.labels = stem.replace_extension(".labels");
  m.name = set.name();
  write_feature_file(set.features(), m.features);
  {
    std::ofstream out(m.labels, std::ios::trunc);
    if (!out) throw IoError("cannot open " + m.labels.string() + " for writing");
    for (const Label l : set.labels()) out << l << "\n";
    if (!out) throw IoError("write failed for " + m.labels.string());
  }
  write_manifest(m, manifest_path);
  return m;
}

}  // namespace linkgcn
