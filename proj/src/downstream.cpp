#include "samgog/downstream.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "samgog/errors.hpp"
#include "samgog/rng.hpp"

namespace samgog {

void GoGClassifierConfig::validate() const {
  if (num_layers < 1) throw ConfigError("downstream.num_layers must be >= 1");
  if (hidden_dim < 1) throw ConfigError("downstream.hidden_dim must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("downstream.dropout must be in [0, 1)");
}

namespace {

SparseMatrix normalise(int n, std::map<std::pair<int, int>, double>& weights) {
  std::vector<double> degree(static_cast<std::size_t>(n), 1.0);
  for (const auto& [ij, w] : weights) degree[static_cast<std::size_t>(ij.first)] += w;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(weights.size() + static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) triplets.emplace_back(v, v, 1.0 / degree[static_cast<std::size_t>(v)]);
  for (const auto& [ij, w] : weights) {
    triplets.emplace_back(ij.first, ij.second,
                          w / std::sqrt(degree[static_cast<std::size_t>(ij.first)] * degree[static_cast<std::size_t>(ij.second)]));
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

}  // namespace

SparseMatrix gog_propagation(const GoGGraph& gog, bool symmetrize) {
  std::map<std::pair<int, int>, double> weights;
  for (const auto& e : gog.edges) {
    if (e.src == e.dst) continue;
    weights[{e.src, e.dst}] += static_cast<double>(e.multiplicity);
    if (symmetrize) weights[{e.dst, e.src}] += static_cast<double>(e.multiplicity);
  }
  return normalise(gog.num_nodes, weights);
}

SparseMatrix weighted_propagation(const Matrix& w, bool symmetrize) {
  if (w.rows() != w.cols()) throw ShapeError("weighted_propagation: weight matrix is not square");
  std::map<std::pair<int, int>, double> weights;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (i == j || w(i, j) == 0.0) continue;
      if (w(i, j) < 0.0) throw ConfigError("weighted_propagation: negative weight");
      weights[{static_cast<int>(i), static_cast<int>(j)}] += w(i, j);
      if (symmetrize) weights[{static_cast<int>(j), static_cast<int>(i)}] += w(i, j);
    }
  }
  return normalise(static_cast<int>(w.rows()), weights);
}

GoGClassifier::GoGClassifier(GoGClassifierConfig config, int input_dim, int num_classes)
    : config_(config), input_dim_(input_dim), num_classes_(num_classes) {
  config_.validate();
  if (input_dim < 1) throw ConfigError("downstream input dimension must be >= 1");
  if (num_classes < 1) throw ConfigError("downstream model needs at least one class");
}

ParamSet GoGClassifier::make_params(std::uint64_t seed) const {
  ParamSet p;
  for (int l = 0; l < config_.num_layers; ++l) {
    const int in = l == 0 ? input_dim_ : config_.hidden_dim;
    const int out = l + 1 == config_.num_layers ? num_classes_ : config_.hidden_dim;
    p.add("gog" + std::to_string(l) + ".W", in, out);
    p.add("gog" + std::to_string(l) + ".b", 1, out);
  }
  p.init_glorot(seed);
  return p;
}

DownstreamPass downstream_forward(const GoGClassifier& model, const ParamSet& params, const SparseMatrix& propagation,
                                  const Matrix& features, Mode mode, std::uint64_t dropout_seed) {
  const auto& cfg = model.config();
  if (propagation.rows() != features.rows() || propagation.cols() != features.rows())
    throw ShapeError("downstream_forward: GoG node count differs from feature rows");
  if (features.cols() != model.input_dim()) throw ShapeError("downstream_forward: feature width differs from input_dim");
  if (params.num_tensors() != 2 * static_cast<std::size_t>(cfg.num_layers))
    throw ShapeError("downstream_forward: parameter set does not match config");
  const bool drop = mode == Mode::train && cfg.dropout > 0.0;

  DownstreamPass pass;
  pass.layers.resize(static_cast<std::size_t>(cfg.num_layers));
  Matrix h = features;
  for (int l = 0; l < cfg.num_layers; ++l) {
    auto& c = pass.layers[static_cast<std::size_t>(l)];
    const bool last = l + 1 == cfg.num_layers;
    c.input = std::move(h);
    if (last) pass.embeddings = c.input;
    c.aggregated = propagation * c.input;
    c.pre = c.aggregated * params.view(2 * static_cast<std::size_t>(l));
    c.pre.rowwise() += RowVector(params.view(2 * static_cast<std::size_t>(l) + 1));
    if (last) {
      pass.logits = c.pre;
      break;
    }
    h = c.pre.cwiseMax(0.0);
    if (drop) {
      c.mask = dropout_mask(h.rows(), h.cols(), cfg.dropout, derive_seed(dropout_seed, {static_cast<std::uint64_t>(l)}));
      h = h.cwiseProduct(c.mask);
    }
  }
  return pass;
}

LossAndGrad downstream_loss_and_grad(const GoGClassifier& model, const ParamSet& params,
                                     const SparseMatrix& propagation, const DownstreamPass& pass,
                                     std::span<const int> rows, std::span<const int> labels) {
  const auto& cfg = model.config();
  auto ce = cross_entropy(pass.logits, rows, labels);
  LossAndGrad out{ce.loss, params.zeros_like()};
  Matrix d_pre = std::move(ce.dlogits);
  for (int l = cfg.num_layers - 1; l >= 0; --l) {
    const auto& c = pass.layers[static_cast<std::size_t>(l)];
    const auto w = 2 * static_cast<std::size_t>(l);
    out.grad.view(w) = c.aggregated.transpose() * d_pre;
    out.grad.view(w + 1) = d_pre.colwise().sum();
    if (l == 0) break;
    Matrix d_in = propagation.transpose() * (d_pre * params.view(w).transpose());
    const auto& prev = pass.layers[static_cast<std::size_t>(l - 1)];
    if (prev.mask.size() != 0) d_in = d_in.cwiseProduct(prev.mask);
    d_pre = d_in.cwiseProduct((prev.pre.array() > 0.0).cast<double>().matrix());
  }
  return out;
}

std::vector<int> argmax_rows(const Matrix& logits) {
  std::vector<int> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    logits.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

MetricsReport compute_metrics(std::span<const int> predictions, std::span<const int> truth, int num_classes,
                              std::span<const int> head_pos, std::span<const int> tail_pos) {
  if (predictions.empty()) throw ConfigError("compute_metrics: empty input");
  if (predictions.size() != truth.size()) throw ShapeError("compute_metrics: predictions and truth differ in length");
  if (num_classes < 1) throw ConfigError("compute_metrics: num_classes must be >= 1");
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  const auto c = static_cast<std::size_t>(num_classes);
  std::vector<double> tp(c, 0.0), actual(c, 0.0), predicted(c, 0.0);
  double correct = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int p = predictions[i];
    const int y = truth[i];
    if (p < 0 || p >= num_classes || y < 0 || y >= num_classes) throw ShapeError("compute_metrics: class out of range");
    actual[static_cast<std::size_t>(y)] += 1.0;
    predicted[static_cast<std::size_t>(p)] += 1.0;
    if (p == y) {
      correct += 1.0;
      tp[static_cast<std::size_t>(y)] += 1.0;
    }
  }
  MetricsReport m;
  m.accuracy = correct / static_cast<double>(predictions.size());
  m.per_class_accuracy.assign(c, nan);
  double recall_sum = 0.0;
  double present = 0.0;
  double f1_sum = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    if (actual[k] > 0.0) {
      m.per_class_accuracy[k] = tp[k] / actual[k];
      recall_sum += m.per_class_accuracy[k];
      present += 1.0;
    }
    const double denom = actual[k] + predicted[k];
    f1_sum += denom > 0.0 ? 2.0 * tp[k] / denom : 0.0;
  }
  m.balanced_accuracy = recall_sum / present;
  m.macro_f1 = f1_sum / static_cast<double>(c);

  auto subset_accuracy = [&](std::span<const int> pos) {
    if (pos.empty()) return nan;
    double hits = 0.0;
    for (const int i : pos) {
      if (i < 0 || static_cast<std::size_t>(i) >= predictions.size()) throw ShapeError("compute_metrics: position out of range");
      hits += predictions[static_cast<std::size_t>(i)] == truth[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    }
    return hits / static_cast<double>(pos.size());
  };
  m.head_accuracy = subset_accuracy(head_pos);
  m.tail_accuracy = subset_accuracy(tail_pos);
  m.edge_homophily_mean = nan;
  m.edge_homophily_std = nan;
  return m;
}

}  // namespace samgog
