#include "samgog/encoder.hpp"

#include <cmath>

#include "samgog/errors.hpp"
#include "samgog/rng.hpp"

namespace samgog {

EncoderArch encoder_arch_from_string(const std::string& name) {
  if (name == "gcn") return EncoderArch::gcn;
  if (name == "gin") return EncoderArch::gin;
  throw ConfigError("unknown encoder architecture '" + name + "'");
}

Readout readout_from_string(const std::string& name) {
  if (name == "mean") return Readout::mean;
  if (name == "sum") return Readout::sum;
  throw ConfigError("unknown readout '" + name + "'");
}

void EncoderConfig::validate() const {
  if (num_layers < 1) throw ConfigError("encoder.num_layers must be >= 1");
  if (hidden_dim < 1) throw ConfigError("encoder.hidden_dim must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("encoder.dropout must be in [0, 1)");
  if (!std::isfinite(epsilon_gin)) throw ConfigError("encoder.epsilon_gin must be finite");
}

namespace {

Matrix relu(const Matrix& m) { return m.cwiseMax(0.0); }

Matrix relu_grad(const Matrix& upstream, const Matrix& pre) {
  return upstream.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
}

void add_bias(Matrix& m, const RowVector& bias) {
  if (bias.size() == 0) return;
  if (bias.size() != m.cols()) throw ShapeError("bias length differs from output width");
  m.rowwise() += bias;
}

void require(bool ok, const char* what) {
  if (!ok) throw ShapeError(what);
}

Matrix apply_mask(const Matrix& m, const Matrix& mask) { return mask.size() == 0 ? m : m.cwiseProduct(mask); }

}  // namespace

Matrix gcn_layer_forward(const Matrix& features, const SparseMatrix& norm_adj, const Matrix& weight,
                         const RowVector& bias, bool use_relu) {
  require(norm_adj.rows() == features.rows() && norm_adj.cols() == features.rows(),
          "gcn layer: adjacency does not match node count");
  require(weight.rows() == features.cols(), "gcn layer: weight rows differ from feature width");
  Matrix out = (norm_adj * features) * weight;
  add_bias(out, bias);
  return use_relu ? relu(out) : out;
}

Matrix gcn_layer_forward(const Matrix& features, std::span<const Edge> edges, const Matrix& weight,
                         const RowVector& bias, bool use_relu) {
  return gcn_layer_forward(features, normalized_adjacency(static_cast<int>(features.rows()), edges), weight, bias,
                           use_relu);
}

Matrix gin_layer_forward(const Matrix& features, const SparseMatrix& sum_adj, const GinWeights& mlp, double epsilon,
                         bool use_relu) {
  require(sum_adj.rows() == features.rows() && sum_adj.cols() == features.rows(),
          "gin layer: adjacency does not match node count");
  require(mlp.w1.rows() == features.cols(), "gin layer: first weight rows differ from feature width");
  require(mlp.w2.rows() == mlp.w1.cols(), "gin layer: MLP weights do not chain");
  const Matrix aggregated = (1.0 + epsilon) * features + sum_adj * features;
  Matrix hidden = aggregated * mlp.w1;
  add_bias(hidden, mlp.b1);
  Matrix out = relu(hidden) * mlp.w2;
  add_bias(out, mlp.b2);
  return use_relu ? relu(out) : out;
}

Matrix gin_layer_forward(const Matrix& features, std::span<const Edge> edges, const GinWeights& mlp, double epsilon,
                         bool use_relu) {
  return gin_layer_forward(features, sum_adjacency(static_cast<int>(features.rows()), edges), mlp, epsilon, use_relu);
}

std::vector<PreparedGraph> prepare_graphs(const GraphDataset& dataset) {
  std::vector<PreparedGraph> out;
  out.reserve(dataset.size());
  for (const auto& g : dataset.graphs) {
    if (g.num_nodes < 1) throw ShapeError("graph " + std::to_string(g.id) + " has no nodes");
    if (g.features.rows() != g.num_nodes) {
      throw ShapeError("graph " + std::to_string(g.id) + " has no features; call build_features first");
    }
    PreparedGraph p;
    p.num_nodes = g.num_nodes;
    p.norm_adj = normalized_adjacency(g.num_nodes, g.edges);
    p.sum_adj = sum_adjacency(g.num_nodes, g.edges);
    p.features = &g.features;
    out.push_back(std::move(p));
  }
  return out;
}

Encoder::Encoder(EncoderConfig config, int input_dim, int num_classes)
    : config_(config), input_dim_(input_dim), num_classes_(num_classes) {
  config_.validate();
  if (input_dim < 1) throw ConfigError("encoder input dimension must be >= 1");
  if (num_classes < 1) throw ConfigError("encoder needs at least one class");
}

ParamSet Encoder::make_params(std::uint64_t seed) const {
  ParamSet p;
  const int h = config_.hidden_dim;
  for (int l = 0; l < config_.num_layers; ++l) {
    const int in = l == 0 ? input_dim_ : h;
    const std::string prefix = "conv" + std::to_string(l) + ".";
    if (config_.arch == EncoderArch::gcn) {
      p.add(prefix + "W", in, h);
      p.add(prefix + "b", 1, h);
    } else {
      p.add(prefix + "W1", in, h);
      p.add(prefix + "b1", 1, h);
      p.add(prefix + "W2", h, h);
      p.add(prefix + "b2", 1, h);
    }
  }
  p.add("head.W1", h, h);
  p.add("head.b1", 1, h);
  p.add("head.W2", h, num_classes_);
  p.add("head.b2", 1, num_classes_);
  p.init_glorot(seed);
  return p;
}

namespace {

// Tensor indices in make_params order.
struct Layout {
  std::size_t per_layer;
  std::size_t head;
  explicit Layout(const EncoderConfig& c)
      : per_layer(c.arch == EncoderArch::gcn ? 2 : 4), head(per_layer * static_cast<std::size_t>(c.num_layers)) {}
  std::size_t layer(int l, std::size_t k) const { return per_layer * static_cast<std::size_t>(l) + k; }
};

constexpr std::uint64_t kHeadDropoutTag = 0xffffffffffffULL;

}  // namespace

EncoderPass encode_dataset(const Encoder& encoder, const ParamSet& params, std::span<const PreparedGraph> graphs,
                           Mode mode, std::uint64_t dropout_seed) {
  const auto& cfg = encoder.config();
  const Layout layout(cfg);
  if (params.num_tensors() != layout.head + 4) throw ShapeError("encoder: parameter set does not match config");
  const bool drop = mode == Mode::train && cfg.dropout > 0.0;
  const auto n_graphs = static_cast<Eigen::Index>(graphs.size());

  EncoderPass pass;
  pass.embeddings.resize(n_graphs, cfg.hidden_dim);
  pass.layers.resize(graphs.size());
  for (std::size_t g = 0; g < graphs.size(); ++g) {
    const auto& graph = graphs[g];
    if (graph.features == nullptr || graph.features->cols() != encoder.input_dim()) {
      throw ShapeError("encoder: graph " + std::to_string(g) + " feature width differs from input_dim");
    }
    Matrix h = *graph.features;
    auto& caches = pass.layers[g];
    caches.resize(static_cast<std::size_t>(cfg.num_layers));
    for (int l = 0; l < cfg.num_layers; ++l) {
      auto& c = caches[static_cast<std::size_t>(l)];
      c.input = std::move(h);
      Matrix out;
      if (cfg.arch == EncoderArch::gcn) {
        c.aggregated = graph.norm_adj * c.input;
        c.pre1 = c.aggregated * params.view(layout.layer(l, 0));
        c.pre1.rowwise() += RowVector(params.view(layout.layer(l, 1)));
        out = relu(c.pre1);
      } else {
        c.aggregated = (1.0 + cfg.epsilon_gin) * c.input + graph.sum_adj * c.input;
        c.pre1 = c.aggregated * params.view(layout.layer(l, 0));
        c.pre1.rowwise() += RowVector(params.view(layout.layer(l, 1)));
        c.post1 = relu(c.pre1);
        c.pre2 = c.post1 * params.view(layout.layer(l, 2));
        c.pre2.rowwise() += RowVector(params.view(layout.layer(l, 3)));
        out = relu(c.pre2);
      }
      if (drop) {
        c.mask = dropout_mask(out.rows(), out.cols(), cfg.dropout,
                              derive_seed(dropout_seed, {g, static_cast<std::uint64_t>(l)}));
      }
      h = apply_mask(out, c.mask);
    }
    RowVector pooled = h.colwise().sum();
    if (cfg.readout == Readout::mean) pooled /= static_cast<double>(graph.num_nodes);
    pass.embeddings.row(static_cast<Eigen::Index>(g)) = pooled;
  }

  pass.head_pre = pass.embeddings * params.view(layout.head + 0);
  pass.head_pre.rowwise() += RowVector(params.view(layout.head + 1));
  if (drop) {
    pass.head_mask = dropout_mask(n_graphs, cfg.hidden_dim, cfg.dropout, derive_seed(dropout_seed, {kHeadDropoutTag}));
  }
  pass.head_post = apply_mask(relu(pass.head_pre), pass.head_mask);
  pass.logits = pass.head_post * params.view(layout.head + 2);
  pass.logits.rowwise() += RowVector(params.view(layout.head + 3));
  return pass;
}

LossAndGrad supervised_loss_and_grad(const Encoder& encoder, const ParamSet& params,
                                     std::span<const PreparedGraph> graphs, const EncoderPass& pass,
                                     std::span<const int> rows, std::span<const int> labels) {
  const auto& cfg = encoder.config();
  const Layout layout(cfg);
  if (pass.layers.size() != graphs.size()) throw ShapeError("encoder: pass does not match graph list");
  auto ce = cross_entropy(pass.logits, rows, labels);

  LossAndGrad out{ce.loss, params.zeros_like()};
  auto& grad = out.grad;

  grad.view(layout.head + 2) = pass.head_post.transpose() * ce.dlogits;
  grad.view(layout.head + 3) = ce.dlogits.colwise().sum();
  Matrix d_head = apply_mask(ce.dlogits * params.view(layout.head + 2).transpose(), pass.head_mask);
  d_head = relu_grad(d_head, pass.head_pre);
  grad.view(layout.head + 0) = pass.embeddings.transpose() * d_head;
  grad.view(layout.head + 1) = d_head.colwise().sum();
  const Matrix d_embed = d_head * params.view(layout.head + 0).transpose();

  for (std::size_t g = 0; g < graphs.size(); ++g) {
    const auto& graph = graphs[g];
    const auto& caches = pass.layers[g];
    RowVector d_pooled = d_embed.row(static_cast<Eigen::Index>(g));
    if (d_pooled.isZero(0.0)) continue;
    if (cfg.readout == Readout::mean) d_pooled /= static_cast<double>(graph.num_nodes);
    Matrix d_h = d_pooled.replicate(graph.num_nodes, 1);
    for (int l = cfg.num_layers - 1; l >= 0; --l) {
      const auto& c = caches[static_cast<std::size_t>(l)];
      const Matrix d_out = apply_mask(d_h, c.mask);
      Matrix d_agg;
      if (cfg.arch == EncoderArch::gcn) {
        const Matrix d_pre = relu_grad(d_out, c.pre1);
        grad.view(layout.layer(l, 0)) += c.aggregated.transpose() * d_pre;
        grad.view(layout.layer(l, 1)) += d_pre.colwise().sum();
        if (l == 0) break;
        d_agg = d_pre * params.view(layout.layer(l, 0)).transpose();
        d_h = graph.norm_adj.transpose() * d_agg;
      } else {
        const Matrix d_pre2 = relu_grad(d_out, c.pre2);
        grad.view(layout.layer(l, 2)) += c.post1.transpose() * d_pre2;
        grad.view(layout.layer(l, 3)) += d_pre2.colwise().sum();
        const Matrix d_pre1 = relu_grad(d_pre2 * params.view(layout.layer(l, 2)).transpose(), c.pre1);
        grad.view(layout.layer(l, 0)) += c.aggregated.transpose() * d_pre1;
        grad.view(layout.layer(l, 1)) += d_pre1.colwise().sum();
        if (l == 0) break;
        d_agg = d_pre1 * params.view(layout.layer(l, 0)).transpose();
        d_h = (1.0 + cfg.epsilon_gin) * d_agg + graph.sum_adj.transpose() * d_agg;
      }
    }
  }
  return out;
}

}  // namespace samgog
