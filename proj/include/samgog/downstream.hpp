#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "samgog/encoder.hpp"
#include "samgog/gog_sampler.hpp"
#include "samgog/matrix.hpp"
#include "samgog/nn.hpp"
#include "samgog/params.hpp"

namespace samgog {

struct GoGClassifierConfig {
  int num_layers = 2;
  int hidden_dim = 64;
  double dropout = 0.0;
  bool symmetrize = true;

  void validate() const;
};

// D^-1/2 (W + I) D^-1/2 with W the multiplicity-weighted GoG adjacency
// (merged with its transpose when symmetrize is set) and D its row sums.
SparseMatrix gog_propagation(const GoGGraph& gog, bool symmetrize);
// Same normalisation over a dense non-negative weight matrix (diagonal ignored).
SparseMatrix weighted_propagation(const Matrix& weights, bool symmetrize);

// Plain GCN node classifier over the GoG: ReLU + dropout between layers, the
// last layer emits class logits.
class GoGClassifier {
 public:
  GoGClassifier(GoGClassifierConfig config, int input_dim, int num_classes);

  const GoGClassifierConfig& config() const noexcept { return config_; }
  int input_dim() const noexcept { return input_dim_; }
  int num_classes() const noexcept { return num_classes_; }
  ParamSet make_params(std::uint64_t seed) const;

 private:
  GoGClassifierConfig config_;
  int input_dim_;
  int num_classes_;
};

struct DownstreamPass {
  Matrix logits;
  // Input of the last layer (post-ReLU/dropout output of the previous one,
  // or H itself for a single-layer model).
  Matrix embeddings;

  struct LayerCache {
    Matrix input;
    Matrix aggregated;  // Â X
    Matrix pre;         // Â X W + b
    Matrix mask;
  };
  std::vector<LayerCache> layers;
};

DownstreamPass downstream_forward(const GoGClassifier& model, const ParamSet& params, const SparseMatrix& propagation,
                                  const Matrix& features, Mode mode, std::uint64_t dropout_seed = 0);

LossAndGrad downstream_loss_and_grad(const GoGClassifier& model, const ParamSet& params,
                                     const SparseMatrix& propagation, const DownstreamPass& pass,
                                     std::span<const int> rows, std::span<const int> labels);

struct MetricsReport {
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> per_class_accuracy;  // recall per class; NaN when the class is absent
  double head_accuracy = 0.0;              // NaN when the subset is empty
  double tail_accuracy = 0.0;
  double edge_homophily_mean = 0.0;
  double edge_homophily_std = 0.0;
};

// head_pos / tail_pos index into `predictions`. Balanced accuracy averages
// recall over classes present in `truth`; macro-F1 averages F1 over all
// classes, with 0 for a class that is neither predicted nor present.
MetricsReport compute_metrics(std::span<const int> predictions, std::span<const int> truth, int num_classes,
                              std::span<const int> head_pos = {}, std::span<const int> tail_pos = {});

std::vector<int> argmax_rows(const Matrix& logits);

}  // namespace samgog
