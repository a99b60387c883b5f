#include <gtest/gtest.h>

#include "samgog/pipeline.hpp"

using namespace samgog;

namespace {

struct Fixture {
  GraphDataset dataset;
  SplitSpec split;
  AllocConfig alloc;
  EncoderConfig encoder;
  SamplerConfig sampler;
  GoGClassifierConfig downstream;
  TrainConfig train;
};

Fixture small_fixture() {
  Fixture f;
  PlantedConfig planted;
  planted.num_graphs = 60;
  f.dataset = build_features(make_planted_dataset(planted, 4), FeatureScheme::node_label_onehot);
  f.split = make_class_imbalanced_split(f.dataset, 3.0, 0.4, 0.2, 4);
  f.alloc.d_bar = 4;
  f.alloc.k_min = 2;
  f.alloc.k_max = 10;
  f.encoder.hidden_dim = 8;
  f.encoder.dropout = 0.2;
  f.downstream.hidden_dim = 8;
  f.downstream.dropout = 0.2;
  f.sampler.seed = 3;
  f.sampler.samples_per_epoch = 2;
  f.train.epochs = 8;
  f.train.seed = 5;
  return f;
}

PipelineResult run(const Fixture& f) {
  return train_full_pipeline(f.dataset, f.split, f.alloc, f.encoder, f.sampler, f.downstream, f.train);
}

}  // namespace

TEST(MaskedLabels, ExposesOnlyVisibleIndices) {
  const auto f = small_fixture();
  const std::vector<int> visible{1, 4};
  const auto view = masked_labels(f.dataset, visible);
  for (std::size_t i = 0; i < view.size(); ++i) {
    if (i == 1 || i == 4)
      EXPECT_EQ(view[i], f.dataset.graphs[i].label);
    else
      EXPECT_FALSE(view[i].has_value());
  }
}

TEST(Pipeline, SameSeedReproducesEverything) {
  const auto f = small_fixture();
  const auto a = run(f);
  const auto b = run(f);
  ASSERT_EQ(a.curve.size(), 8u);
  for (std::size_t i = 0; i < a.state.encoder_params.size(); ++i)
    EXPECT_EQ(a.state.encoder_params.values()[i], b.state.encoder_params.values()[i]);
  for (std::size_t i = 0; i < a.state.downstream_params.size(); ++i)
    EXPECT_EQ(a.state.downstream_params.values()[i], b.state.downstream_params.values()[i]);
  EXPECT_EQ(a.metrics.balanced_accuracy, b.metrics.balanced_accuracy);
  EXPECT_EQ(a.curve.back().downstream_loss, b.curve.back().downstream_loss);
}

TEST(Pipeline, TestLabelsNeverInfluenceTraining) {
  auto f = small_fixture();
  const auto a = run(f);
  for (int i : f.split.test_idx) f.dataset.graphs[i].label = 1 - *f.dataset.graphs[i].label;
  const auto b = run(f);
  EXPECT_EQ(a.best_epoch, b.best_epoch);
  for (std::size_t i = 0; i < a.state.encoder_params.size(); ++i)
    EXPECT_EQ(a.state.encoder_params.values()[i], b.state.encoder_params.values()[i]);
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    EXPECT_EQ(a.curve[i].encoder_loss, b.curve[i].encoder_loss);
    EXPECT_EQ(a.curve[i].downstream_loss, b.curve[i].downstream_loss);
  }
}

TEST(Pipeline, AllocationRespectsConstraintsAndMetricsAreSane) {
  const auto f = small_fixture();
  const auto r = run(f);
  r.allocation.validate(f.alloc);
  EXPECT_GE(r.metrics.balanced_accuracy, 0.0);
  EXPECT_LE(r.metrics.balanced_accuracy, 1.0);
  EXPECT_GE(r.metrics.edge_homophily_mean, 0.0);
  EXPECT_LE(r.metrics.edge_homophily_mean, 1.0);
  EXPECT_EQ(r.state.samples_per_epoch, 2);
  EXPECT_EQ(r.state.epoch, 8);
}

TEST(Pipeline, TrainingLowersEncoderLoss) {
  auto f = small_fixture();
  f.train.epochs = 40;
  f.encoder.dropout = 0.0;
  const auto r = run(f);
  EXPECT_LT(r.curve.back().encoder_loss, r.curve.front().encoder_loss);
  EXPECT_LT(r.curve.back().downstream_loss, r.curve.front().downstream_loss);
}
