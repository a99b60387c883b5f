#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "samgog/pipeline.hpp"
#include "samgog/similarity.hpp"

namespace samgog {

// INI file with dotted sections, e.g.
//
//   [dataset]
//   source = tudataset        ; or planted
//   path = data/PTC_MR
//   name = PTC_MR
//   features = node-label-onehot
//   [alloc]
//   d_bar = 5                 ; required
//
// The full key list is in README.md. Unknown keys are rejected.
struct ExperimentConfig {
  std::string dataset_source = "tudataset";
  std::filesystem::path dataset_path;
  std::string dataset_name;
  FeatureScheme features = FeatureScheme::node_label_onehot;
  PlantedConfig planted;
  std::uint64_t planted_seed = 0;

  std::optional<std::filesystem::path> split_file;
  double rho_class = 1.0;
  double train_fraction = 0.5;
  double val_fraction = 0.2;
  std::uint64_t split_seed = 0;

  AllocConfig alloc;
  EncoderConfig encoder;
  SamplerConfig sampler;
  GoGClassifierConfig downstream;
  TrainConfig train;

  int runs = 1;
  int parallel_runs = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  bool dump_gog = false;
  bool dump_allocation = false;

  void validate() const;
};

ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Dataset with features built, and the split it is evaluated on.
GraphDataset load_experiment_dataset(const ExperimentConfig& config);
SplitSpec load_experiment_split(const ExperimentConfig& config, const GraphDataset& dataset);

// Seed of run r.
std::uint64_t run_seed(std::uint64_t master, int run) noexcept;

struct RunOutcome {
  int run = 0;
  std::uint64_t seed = 0;
  PipelineResult result;
};

// Column order of metrics.csv; the last two rows are "mean" and "std"
// (sample standard deviation, 0 for a single run).
inline constexpr const char* kMetricsColumns[] = {
    "run",          "seed",          "accuracy",           "balanced_accuracy", "macro_f1",
    "head_accuracy", "tail_accuracy", "edge_homophily_mean", "edge_homophily_std", "encoder_accuracy",
    "encoder_balanced_accuracy", "best_epoch"};
inline constexpr const char* kCurveColumns[] = {
    "run", "epoch", "encoder_loss", "downstream_loss", "val_balanced_accuracy", "encoder_val_balanced_accuracy",
    "mean_edge_homophily"};
inline constexpr const char* kSweepColumns[] = {"d_bar", "total_degree", "edge_homophily_mean", "edge_homophily_std",
                                                "expected_homophily", "samples"};

std::vector<RunOutcome> run_all(const ExperimentConfig& config, const GraphDataset& dataset, const SplitSpec& split);
void write_metrics_csv(std::ostream& out, std::span<const RunOutcome> runs);
void write_metrics_json(std::ostream& out, std::span<const RunOutcome> runs);
void write_curve_csv(std::ostream& out, std::span<const RunOutcome> runs);

// Trains `runs` seeded repetitions and writes metrics.csv, metrics.json and
// curve.csv (plus optional dumps) under config.out_dir. Returns the process
// exit status; diagnostics go to `err`.
int run_experiment(const ExperimentConfig& config, std::ostream& err);

struct HomophilySweepRow {
  double d_bar = 0.0;
  std::int64_t total_degree = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double expected = 0.0;
  int samples = 0;
};

// For each d_bar: allocate (k_min lowered to floor(d_bar) and k_max raised to
// ceil(d_bar) when needed), draw `samples` GoGs and record edge homophily
// against the true labels, next to the closed-form expectation.
std::vector<HomophilySweepRow> homophily_sweep(const GraphDataset& dataset, const SplitSpec& split,
                                               const SimilarityMatrix& sim, const AllocConfig& alloc,
                                               const SamplerConfig& sampler, std::span<const double> degree_values,
                                               int samples = 10);
void write_sweep_csv(std::ostream& out, std::span<const HomophilySweepRow> rows);

// Trains one run per the config (skipped when epochs is 0), builds S from the
// encoder's logits and writes homophily_sweep.csv. Returns the exit status.
int emit_homophily_sweep(const ExperimentConfig& config, std::span<const double> degree_values, std::ostream& err);

}  // namespace samgog
