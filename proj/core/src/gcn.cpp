#include "linkgcn/gcn.hpp"

#include <atomic>
#include <cmath>
#include <fstream>

#include "binary_io.hpp"
#include "linkgcn/error.hpp"
#include "linkgcn/hash.hpp"
#include "linkgcn/random.hpp"

namespace linkgcn {

namespace {

constexpr char kCheckpointMagic[4] = {'L', 'G', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

std::uint64_t next_instance() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

double leaky(double z, double slope) { return z > 0.0 ? z : slope * z; }

}  // namespace

void GcnArchitecture::validate() const {
  if (input_dim < 1) throw ConfigError("GCN input dimension must be >= 1");
  if (hidden.empty()) throw ConfigError("GCN needs at least one graph layer");
  for (const std::size_t h : hidden) {
    if (h < 1) throw ConfigError("GCN hidden widths must be >= 1");
  }
  if (!std::isfinite(leaky_slope)) throw ConfigError("leaky slope must be finite");
}

std::size_t GcnArchitecture::parameter_count() const {
  std::size_t total = 0;
  for (std::size_t l = 0; l < hidden.size(); ++l) total += 2 * layer_input(l) * hidden[l] + hidden[l];
  return total + hidden.back() * 2 + 2;
}

std::uint64_t GcnArchitecture::hash() const {
  Fnv1a h;
  h.str("gcn").u64(input_dim).u64(hidden.size());
  for (const std::size_t w : hidden) h.u64(w);
  h.f64(leaky_slope);
  return h.digest();
}

GcnParams::GcnParams(GcnArchitecture arch) : arch_(std::move(arch)), instance_(next_instance()) {
  arch_.validate();
  std::size_t offset = 0;
  for (std::size_t l = 0; l < arch_.layer_count(); ++l) {
    const std::size_t rows = 2 * arch_.layer_input(l);
    const std::size_t cols = arch_.hidden[l];
    blocks_.push_back({offset, rows, cols, offset + rows * cols});
    offset += rows * cols + cols;
  }
  blocks_.push_back({offset, arch_.hidden.back(), 2, offset + arch_.hidden.back() * 2});
  offset += arch_.hidden.back() * 2 + 2;
  values_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(offset));
}

GcnParams::GcnParams(const GcnParams& other)
    : arch_(other.arch_), values_(other.values_), blocks_(other.blocks_),
      instance_(next_instance()) {}

GcnParams& GcnParams::operator=(const GcnParams& other) {
  if (this != &other) {
    arch_ = other.arch_;
    values_ = other.values_;
    blocks_ = other.blocks_;
    ++revision_;
  }
  return *this;
}

Eigen::Map<const Eigen::MatrixXd> GcnParams::layer_weight(std::size_t l) const {
  const Block& b = blocks_.at(l);
  return {values_.data() + b.weight_offset, static_cast<Eigen::Index>(b.rows),
          static_cast<Eigen::Index>(b.cols)};
}

Eigen::Map<const Eigen::VectorXd> GcnParams::layer_bias(std::size_t l) const {
  const Block& b = blocks_.at(l);
  return {values_.data() + b.bias_offset, static_cast<Eigen::Index>(b.cols)};
}

Eigen::Map<const Eigen::MatrixXd> GcnParams::head_weight() const {
  const Block& b = blocks_.back();
  return {values_.data() + b.weight_offset, static_cast<Eigen::Index>(b.rows),
          static_cast<Eigen::Index>(b.cols)};
}

Eigen::Map<const Eigen::VectorXd> GcnParams::head_bias() const {
  const Block& b = blocks_.back();
  return {values_.data() + b.bias_offset, 2};
}

Eigen::Map<Eigen::MatrixXd> GcnParams::layer_weight(std::size_t l) {
  ++revision_;
  const Block& b = blocks_.at(l);
  return {values_.data() + b.weight_offset, static_cast<Eigen::Index>(b.rows),
          static_cast<Eigen::Index>(b.cols)};
}

Eigen::Map<Eigen::VectorXd> GcnParams::layer_bias(std::size_t l) {
  ++revision_;
  const Block& b = blocks_.at(l);
  return {values_.data() + b.bias_offset, static_cast<Eigen::Index>(b.cols)};
}

Eigen::Map<Eigen::MatrixXd> GcnParams::head_weight() {
  ++revision_;
  const Block& b = blocks_.back();
  return {values_.data() + b.weight_offset, static_cast<Eigen::Index>(b.rows),
          static_cast<Eigen::Index>(b.cols)};
}

Eigen::Map<Eigen::VectorXd> GcnParams::head_bias() {
  ++revision_;
  const Block& b = blocks_.back();
  return {values_.data() + b.bias_offset, 2};
}

GcnParams init_params(std::size_t input_dim, std::vector<std::size_t> hidden, std::uint64_t seed,
                      double leaky_slope) {
  GcnParams params(GcnArchitecture{input_dim, std::move(hidden), leaky_slope});
  Rng rng(seed);
  const auto fill = [&](Eigen::Map<Eigen::MatrixXd> w) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.rows()));
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-bound, bound);
    }
  };
  for (std::size_t l = 0; l < params.layer_count(); ++l) fill(params.layer_weight(l));
  fill(params.head_weight());
  return params;
}

void check_input_dim(const GcnParams& params, std::size_t dim) {
  const std::size_t expected = params.architecture().input_dim;
  if (dim != expected) {
    throw ShapeError("layer 0: model expects input dimension " + std::to_string(expected) +
                     " but features have dimension " + std::to_string(dim));
  }
}

ForwardTrace forward(const Subgraph& sg, const GcnParams& params) {
  check_input_dim(params, static_cast<std::size_t>(sg.features.cols()));
  const auto n = sg.features.rows();
  if (sg.adjacency.rows() != n || sg.adjacency.cols() != n) {
    throw ShapeError("adjacency is " + std::to_string(sg.adjacency.rows()) + "x" +
                     std::to_string(sg.adjacency.cols()) + " for " + std::to_string(n) + " nodes");
  }
  if (sg.one_hop_count > static_cast<std::size_t>(n)) throw ShapeError("1-hop count exceeds node count");

  const double slope = params.architecture().leaky_slope;
  ForwardTrace trace;
  trace.adjacency = sg.adjacency;
  trace.one_hop_count = sg.one_hop_count;
  trace.params_instance = params.instance();
  trace.params_revision = params.revision();

  Eigen::MatrixXd h = sg.features;
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const auto d = h.cols();
    Eigen::MatrixXd cat(n, 2 * d);
    cat.leftCols(d) = h;
    cat.rightCols(d).noalias() = sg.adjacency * h;
    Eigen::MatrixXd z = cat * params.layer_weight(l);
    z.rowwise() += params.layer_bias(l).transpose();
    h = z.unaryExpr([slope](double v) { return leaky(v, slope); });
    trace.concat.push_back(std::move(cat));
    trace.preact.push_back(std::move(z));
  }
  const auto m = static_cast<Eigen::Index>(sg.one_hop_count);
  trace.logits = h.topRows(m) * params.head_weight();
  trace.logits.rowwise() += params.head_bias().transpose();
  trace.embedding = std::move(h);
  return trace;
}

double link_probability(double z_pos, double z_neg) { return 1.0 / (1.0 + std::exp(z_neg - z_pos)); }

GcnGradients backward(ForwardTrace& trace, const GcnParams& params,
                      const Eigen::MatrixXd& logit_grad) {
  if (trace.consumed) throw ConfigError("stale trace: backward already ran on this trace");
  if (trace.params_instance != params.instance() || trace.params_revision != params.revision()) {
    throw ConfigError("stale trace: parameters changed since forward");
  }
  if (logit_grad.rows() != trace.logits.rows() || logit_grad.cols() != 2) {
    throw ShapeError("logit gradient shape does not match the trace logits");
  }
  trace.consumed = true;

  GcnGradients grads(params.architecture());
  const double slope = params.architecture().leaky_slope;
  const auto m = static_cast<Eigen::Index>(trace.one_hop_count);
  const auto n = trace.embedding.rows();

  grads.head_weight().noalias() = trace.embedding.topRows(m).transpose() * logit_grad;
  grads.head_bias() = logit_grad.colwise().sum().transpose();

  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(n, trace.embedding.cols());
  dh.topRows(m).noalias() = logit_grad * params.head_weight().transpose();

  for (std::size_t l = params.layer_count(); l-- > 0;) {
    const Eigen::MatrixXd& z = trace.preact[l];
    const Eigen::MatrixXd dz =
        dh.cwiseProduct(z.unaryExpr([slope](double v) { return v > 0.0 ? 1.0 : slope; }));
    grads.layer_weight(l).noalias() = trace.concat[l].transpose() * dz;
    grads.layer_bias(l) = dz.colwise().sum().transpose();
    if (l == 0) break;
    const Eigen::MatrixXd dcat = dz * params.layer_weight(l).transpose();
    const auto d = dcat.cols() / 2;
    dh = dcat.leftCols(d);
    dh.noalias() += trace.adjacency.transpose() * dcat.rightCols(d);
  }
  return grads;
}

void save_checkpoint(const GcnParams& params, const std::filesystem::path& path,
                     std::uint64_t config_hash) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto& arch = params.architecture();
  out.write(kCheckpointMagic, 4);
  detail::write_le<std::uint32_t>(out, kCheckpointVersion);
  detail::write_le<std::uint64_t>(out, config_hash);
  detail::write_le<std::uint64_t>(out, arch.input_dim);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(arch.hidden.size()));
  for (const std::size_t h : arch.hidden) detail::write_le<std::uint64_t>(out, h);
  detail::write_le<double>(out, arch.leaky_slope);
  const auto& values = params.values();
  detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) detail::write_le<double>(out, values[i]);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || !std::equal(magic, magic + 4, kCheckpointMagic)) {
    throw LoadError("bad magic in checkpoint " + path.string() + " (expected LGCK)");
  }
  const auto version = detail::read_le<std::uint32_t>(in, "checkpoint version");
  if (version != kCheckpointVersion) {
    throw LoadError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto config_hash = detail::read_le<std::uint64_t>(in, "config hash");
  GcnArchitecture arch;
  arch.input_dim = detail::read_le<std::uint64_t>(in, "input dimension");
  const auto layers = detail::read_le<std::uint32_t>(in, "layer count");
  if (layers == 0 || layers > 1024) throw LoadError("implausible layer count " + std::to_string(layers));
  arch.hidden.clear();
  for (std::uint32_t l = 0; l < layers; ++l) {
    arch.hidden.push_back(detail::read_le<std::uint64_t>(in, "shape of layer " + std::to_string(l)));
  }
  arch.leaky_slope = detail::read_le<double>(in, "leaky slope");
  try {
    arch.validate();
  } catch (const ConfigError& e) {
    throw LoadError(std::string("invalid checkpoint shape table: ") + e.what());
  }
  const auto count = detail::read_le<std::uint64_t>(in, "parameter count");
  if (count != arch.parameter_count()) {
    throw LoadError("checkpoint parameter count " + std::to_string(count) +
                    " does not match its shape table (" + std::to_string(arch.parameter_count()) +
                    ")");
  }
  Checkpoint ckpt{GcnParams(arch), config_hash};
  auto& values = ckpt.params.values();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    values[i] = detail::read_le<double>(in, "parameter payload");
    if (!std::isfinite(values[i])) throw LoadError("non-finite parameter at offset " + std::to_string(i));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw LoadError("trailing bytes after checkpoint payload");
  return ckpt;
}

}  // namespace linkgcn
