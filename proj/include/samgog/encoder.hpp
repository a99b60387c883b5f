#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "samgog/graph_data.hpp"
#include "samgog/matrix.hpp"
#include "samgog/nn.hpp"
#include "samgog/params.hpp"

namespace samgog {

enum class EncoderArch { gcn, gin };
enum class Readout { mean, sum };

EncoderArch encoder_arch_from_string(const std::string& name);
Readout readout_from_string(const std::string& name);

struct EncoderConfig {
  EncoderArch arch = EncoderArch::gin;
  int num_layers = 2;
  int hidden_dim = 32;
  double dropout = 0.0;
  double epsilon_gin = 0.0;
  Readout readout = Readout::mean;

  void validate() const;
};

// Single-layer operators, usable on their own.
//   gcn: act(Â X W + b), Â = D^-1/2 (A + I) D^-1/2
//   gin: act(MLP((1 + eps) X + A X)), MLP = Linear -> ReLU -> Linear
// An empty bias means no bias.
Matrix gcn_layer_forward(const Matrix& features, const SparseMatrix& norm_adj, const Matrix& weight,
                         const RowVector& bias = {}, bool relu = true);
Matrix gcn_layer_forward(const Matrix& features, std::span<const Edge> edges, const Matrix& weight,
                         const RowVector& bias = {}, bool relu = true);

struct GinWeights {
  Matrix w1;
  RowVector b1;
  Matrix w2;
  RowVector b2;
};
Matrix gin_layer_forward(const Matrix& features, const SparseMatrix& sum_adj, const GinWeights& mlp, double epsilon,
                         bool relu = false);
Matrix gin_layer_forward(const Matrix& features, std::span<const Edge> edges, const GinWeights& mlp, double epsilon,
                         bool relu = false);

// Propagation operators and features of one graph, built once per dataset.
struct PreparedGraph {
  int num_nodes = 0;
  SparseMatrix norm_adj;
  SparseMatrix sum_adj;
  const Matrix* features = nullptr;
};
// The dataset must outlive the result.
std::vector<PreparedGraph> prepare_graphs(const GraphDataset& dataset);

// GNN layers, per-graph readout, then a Linear -> ReLU -> Linear head. Dropout
// acts on every hidden activation in train mode only.
class Encoder {
 public:
  Encoder(EncoderConfig config, int input_dim, int num_classes);

  const EncoderConfig& config() const noexcept { return config_; }
  int input_dim() const noexcept { return input_dim_; }
  int num_classes() const noexcept { return num_classes_; }

  ParamSet make_params(std::uint64_t seed) const;

 private:
  EncoderConfig config_;
  int input_dim_;
  int num_classes_;
};

// Forward results plus the activations needed for backprop.
struct EncoderPass {
  Matrix embeddings;  // N x hidden_dim (readout output, the GoG node features)
  Matrix logits;      // N x num_classes

  struct LayerCache {
    Matrix input;      // H_{l-1}
    Matrix aggregated; // Â H (gcn) or (1+eps)H + A H (gin)
    Matrix pre1;       // gcn: pre-activation; gin: first MLP pre-activation
    Matrix post1;      // gin: ReLU(pre1)
    Matrix pre2;       // gin: second MLP pre-activation
    Matrix mask;       // dropout scale mask
  };
  std::vector<std::vector<LayerCache>> layers;  // [graph][layer]
  Matrix head_pre;   // N x hidden
  Matrix head_mask;  // N x hidden
  Matrix head_post;  // N x hidden, after ReLU and dropout
};

EncoderPass encode_dataset(const Encoder& encoder, const ParamSet& params, std::span<const PreparedGraph> graphs,
                           Mode mode, std::uint64_t dropout_seed = 0);

struct LossAndGrad {
  double loss = 0.0;
  ParamSet grad;
};

// Mean cross-entropy over `rows` and its gradient for every encoder parameter.
LossAndGrad supervised_loss_and_grad(const Encoder& encoder, const ParamSet& params,
                                     std::span<const PreparedGraph> graphs, const EncoderPass& pass,
                                     std::span<const int> rows, std::span<const int> labels);

}  // namespace samgog
