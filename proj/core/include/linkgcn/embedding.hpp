#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace linkgcn {

using FeatureMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Label = std::int32_t;

/// A labeled set of embeddings: N rows of dimension d plus one dense identity
/// label per row.
///
/// Rows are unit-normalized on construction unless the caller explicitly asks
/// for raw features (test fixtures only). Labels passed in may be arbitrary
/// integers; they are re-mapped to 0..C-1 in ascending order of the original
/// id and the original ids are kept in `original_labels()`.
class EmbeddingSet {
 public:
  enum class Normalize { Yes, No };

  EmbeddingSet(FeatureMatrix features, std::span<const std::int64_t> labels, std::string name,
               Normalize normalize = Normalize::Yes);

  std::size_t size() const { return static_cast<std::size_t>(features_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features_.cols()); }
  std::size_t class_count() const { return original_labels_.size(); }

  const FeatureMatrix& features() const { return features_; }
  std::span<const Label> labels() const { return labels_; }
  Label label(std::size_t i) const { return labels_[i]; }
  const std::string& name() const { return name_; }

  /// original_labels()[c] is the id that dense label c was mapped from.
  std::span<const std::int64_t> original_labels() const { return original_labels_; }

  /// Number of rows per dense label.
  std::vector<std::size_t> class_sizes() const;

  void set_name(std::string name) { name_ = std::move(name); }

 private:
  FeatureMatrix features_;
  std::vector<Label> labels_;
  std::vector<std::int64_t> original_labels_;
  std::string name_;
};

/// Parameters of the Gaussian-blob generator used as a stand-in for face
/// embeddings.
struct SyntheticSpec {
  std::string name = "synthetic";
  std::vector<std::size_t> class_sizes;
  std::size_t dim = 16;
  double spread = 0.05;      // per-coordinate std-dev around the class center
  double separation = 4.0;   // minimum pairwise distance between centers
  // When > 0, within-class variation lives in a random rank-`latent_dim`
  // subspace per class (scaled by `spread`) plus isotropic `noise`, instead
  // of isotropic `spread`. Low rank keeps near neighbors purer than far ones.
  std::size_t latent_dim = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// (m, n) protocol: keep the m largest identities whole, truncate the rest to n.
struct SynthesisSpec {
  std::size_t majority_identity_count = 0;
  std::size_t minority_identity_size = 1;
  std::uint64_t seed = 0;
};

EmbeddingSet generate_synthetic(const SyntheticSpec& spec);

EmbeddingSet build_imbalanced_subset(const EmbeddingSet& set, const SynthesisSpec& spec);

/// Rows of `set` at `rows` (in that order), labels re-densified.
EmbeddingSet select_rows(const EmbeddingSet& set, std::span<const std::size_t> rows,
                         std::string name);

// On-disk formats -----------------------------------------------------------

/// File locations referenced by a dataset manifest. Relative paths in the
/// manifest are resolved against the manifest's directory.
struct Manifest {
  std::filesystem::path features;
  std::filesystem::path labels;
  std::string name;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Reads an "LBEM" feature file plus a label text file.
EmbeddingSet load_embeddings(const std::filesystem::path& features_path,
                             const std::filesystem::path& labels_path, std::string name);

/// Reads a dataset through its JSON manifest.
EmbeddingSet load_embeddings(const std::filesystem::path& manifest_path);

/// Writes <stem>.lbem and <stem>.labels next to `manifest_path` and the
/// manifest itself. Returns the manifest that was written.
Manifest save_embeddings(const EmbeddingSet& set, const std::filesystem::path& manifest_path);

void write_feature_file(const FeatureMatrix& features, const std::filesystem::path& path);
FeatureMatrix read_feature_file(const std::filesystem::path& path);

}  // namespace linkgcn
