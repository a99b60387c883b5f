#pragma once

#include <cstdint>
#include <vector>

#include "samgog/degree_alloc.hpp"
#include "samgog/downstream.hpp"
#include "samgog/encoder.hpp"
#include "samgog/gog_sampler.hpp"
#include "samgog/graph_data.hpp"
#include "samgog/optim.hpp"
#include "samgog/params.hpp"

namespace samgog {

struct TrainConfig {
  int epochs = 100;
  std::uint64_t seed = 0;  // parameter init and dropout streams
  OptimizerConfig encoder_optimizer;
  OptimizerConfig downstream_optimizer;
  // GoGs averaged at validation/test time; 0 means samples_per_epoch.
  int eval_samples = 0;
  // Keep the parameters with the best validation balanced accuracy. When
  // false the last epoch's parameters are returned and validation is skipped.
  bool select_best = true;

  void validate() const;
};

struct TrainState {
  ParamSet encoder_params;
  ParamSet downstream_params;
  Optimizer encoder_optimizer;
  Optimizer downstream_optimizer;
  std::uint64_t seed = 0;
  int epoch = 0;
  int samples_per_epoch = 1;
};

struct EpochRecord {
  int epoch = 0;
  double encoder_loss = 0.0;
  double downstream_loss = 0.0;
  double val_balanced_accuracy = 0.0;
  double encoder_val_balanced_accuracy = 0.0;
  double mean_edge_homophily = 0.0;
};

struct PipelineResult {
  TrainState state;
  MetricsReport metrics;        // GoG classifier on the test indices
  MetricsReport encoder_only;   // encoder head on the same test indices
  std::vector<EpochRecord> curve;
  DegreeAllocation allocation;
  int best_epoch = 0;           // 0 = untrained parameters
  int encoder_best_epoch = 0;
};

// Pre-allocates degrees, then per epoch: encode (eval mode) -> P, S; sample t
// GoGs; one downstream step on the loss averaged over them; one encoder step
// on its own supervised loss. Test labels are read only for the final metrics
// and the edge-homophily diagnostics.
PipelineResult train_full_pipeline(const GraphDataset& dataset, const SplitSpec& split, const AllocConfig& alloc_config,
                                   const EncoderConfig& encoder_config, const SamplerConfig& sampler_config,
                                   const GoGClassifierConfig& downstream_config, const TrainConfig& train_config);

// Label view exposing only the given indices.
LabelView masked_labels(const GraphDataset& dataset, std::span<const int> visible);

}  // namespace samgog
