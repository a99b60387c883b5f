#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "samgog/errors.hpp"
#include "samgog/experiment.hpp"
#include "test_util.hpp"

using namespace samgog;
using samgog::testing::TempDir;

namespace {

const char* kPlantedConfig = R"(
[dataset]
source = planted
seed = 3
[planted]
num_graphs = 60
[split]
rho_class = 3
train_fraction = 0.4
val_fraction = 0.2
[alloc]
d_bar = 4
k_min = 2
k_max = 10
[encoder]
arch = gcn
hidden_dim = 8
[downstream]
hidden_dim = 8
[train]
epochs = 5
runs = 3
seed = 9
)";

ExperimentConfig planted_config(const std::filesystem::path& out) {
  std::istringstream in(kPlantedConfig);
  auto cfg = parse_experiment_config(in);
  cfg.out_dir = out;
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cells_in(line);
    std::string cell;
    while (std::getline(cells_in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(ExperimentConfig, MissingDBarIsNamed) {
  std::string text = kPlantedConfig;
  text.replace(text.find("d_bar = 4"), 9, "");
  std::istringstream in(text);
  try {
    parse_experiment_config(in);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("alloc.d_bar"), std::string::npos) << e.what();
  }
}

TEST(ExperimentConfig, UnknownKeyAndBadValueAreNamed) {
  std::istringstream typo(std::string(kPlantedConfig) + "[sampler]\nmdoe = x\n");
  EXPECT_THROW(parse_experiment_config(typo), ConfigError);
  std::string text = kPlantedConfig;
  text.replace(text.find("epochs = 5"), 10, "epochs = five");
  std::istringstream bad(text);
  try {
    parse_experiment_config(bad);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("train.epochs"), std::string::npos);
  }
}

TEST(ExperimentConfig, ParsesNestedSections) {
  std::istringstream in(std::string(kPlantedConfig) +
                        "[sampler]\nmode = with-replacement\nsamples_per_epoch = 4\n[output]\ndump_gog = true\n");
  const auto cfg = parse_experiment_config(in);
  EXPECT_EQ(cfg.sampler.mode, SampleMode::with_replacement);
  EXPECT_EQ(cfg.sampler.samples_per_epoch, 4);
  EXPECT_EQ(cfg.encoder.arch, EncoderArch::gcn);
  EXPECT_EQ(cfg.runs, 3);
  EXPECT_TRUE(cfg.dump_gog);
  EXPECT_DOUBLE_EQ(cfg.rho_class, 3.0);
}

TEST(RunExperiment, SingleRunWritesOneRow) {
  TempDir tmp;
  auto cfg = planted_config(tmp.path());
  cfg.runs = 1;
  std::ostringstream err;
  ASSERT_EQ(run_experiment(cfg, err), 0) << err.str();
  const auto rows = csv_rows(slurp(tmp.path() / "metrics.csv"));
  ASSERT_EQ(rows.size(), 4u);  // header, run 0, mean, std
  EXPECT_EQ(rows[0].size(), std::size(kMetricsColumns));
  EXPECT_EQ(rows[1][0], "0");
  EXPECT_EQ(rows[2][0], "mean");
  EXPECT_TRUE(std::filesystem::exists(tmp.path() / "metrics.json"));
  EXPECT_EQ(csv_rows(slurp(tmp.path() / "curve.csv")).size(), 1u + 5u);
}

TEST(RunExperiment, ThreeRunsReproduceBytesAndSummary) {
  TempDir a, b, c;
  std::ostringstream err;
  auto cfg = planted_config(a.path());
  ASSERT_EQ(run_experiment(cfg, err), 0) << err.str();
  cfg.out_dir = b.path();
  ASSERT_EQ(run_experiment(cfg, err), 0);
  cfg.out_dir = c.path();
  cfg.parallel_runs = 3;
  ASSERT_EQ(run_experiment(cfg, err), 0);
  const auto text = slurp(a.path() / "metrics.csv");
  EXPECT_EQ(text, slurp(b.path() / "metrics.csv"));
  EXPECT_EQ(text, slurp(c.path() / "metrics.csv"));
  EXPECT_EQ(slurp(a.path() / "curve.csv"), slurp(c.path() / "curve.csv"));

  const auto rows = csv_rows(text);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t col = 2; col < rows[0].size(); ++col) {
    double mean = 0.0;
    for (int r = 1; r <= 3; ++r) mean += std::stod(rows[r][col]);
    mean /= 3.0;
    double var = 0.0;
    for (int r = 1; r <= 3; ++r) var += std::pow(std::stod(rows[r][col]) - mean, 2);
    const double sd = std::sqrt(var / 2.0);
    EXPECT_NEAR(std::stod(rows[4][col]), mean, 1e-12) << rows[0][col];
    EXPECT_NEAR(std::stod(rows[5][col]), sd, 1e-12) << rows[0][col];
  }
}

TEST(RunExperiment, BadDatasetPathExitsNonZero) {
  TempDir tmp;
  auto cfg = planted_config(tmp.path());
  cfg.dataset_source = "tudataset";
  cfg.dataset_path = tmp.path() / "nowhere";
  cfg.dataset_name = "X";
  std::ostringstream err;
  EXPECT_NE(run_experiment(cfg, err), 0);
  EXPECT_NE(err.str().find("X_A.txt"), std::string::npos) << err.str();
}

TEST(RunExperiment, DumpsAllocationAndGog) {
  TempDir tmp;
  auto cfg = planted_config(tmp.path());
  cfg.runs = 1;
  cfg.dump_gog = cfg.dump_allocation = true;
  std::ostringstream err;
  ASSERT_EQ(run_experiment(cfg, err), 0) << err.str();
  EXPECT_TRUE(std::filesystem::exists(tmp.path() / "allocation_run0.txt"));
  std::ifstream in(tmp.path() / "gog_run0.txt");
  const auto gog = read_gog(in);
  EXPECT_EQ(gog.num_nodes, 60);
}

TEST(HomophilySweep, SingleLabelDatasetIsAlwaysPure) {
  TempDir tmp;
  auto cfg = planted_config(tmp.path());
  auto ds = load_experiment_dataset(cfg);
  for (auto& g : ds.graphs) g.label = 0;
  SplitSpec split;
  split.train_idx = {0, 1, 2};
  const Matrix logits = Matrix::Zero(60, 2);
  const auto sim = similarity_matrix(build_prob_matrix(logits, masked_labels(ds, split.train_idx)));
  const std::vector<double> degrees{1, 2, 3};
  for (const auto& row : homophily_sweep(ds, split, sim, cfg.alloc, cfg.sampler, degrees)) {
    EXPECT_EQ(row.mean, 1.0);
    EXPECT_EQ(row.expected, 1.0);
  }
}

TEST(HomophilySweep, FullyLabeledOneHotIsPure) {
  TempDir tmp;
  auto cfg = planted_config(tmp.path());
  const auto ds = load_experiment_dataset(cfg);
  SplitSpec split;
  for (int i = 0; i < 60; ++i) split.train_idx.push_back(i);
  const Matrix logits = Matrix::Zero(60, 2);
  const auto sim = similarity_matrix(build_prob_matrix(logits, masked_labels(ds, split.train_idx)));
  const std::vector<double> degrees{2, 5};
  for (const auto& row : homophily_sweep(ds, split, sim, cfg.alloc, cfg.sampler, degrees)) EXPECT_EQ(row.mean, 1.0);
}

TEST(HomophilySweep, EmitsOneRowPerDegreeWithClosedForm) {
  TempDir tmp;
  auto cfg = planted_config(tmp.path());
  cfg.sampler.mode = SampleMode::with_replacement;
  std::vector<double> degrees;
  for (int d = 1; d <= 10; ++d) degrees.push_back(d);
  std::ostringstream err;
  ASSERT_EQ(emit_homophily_sweep(cfg, degrees, err), 0) << err.str();
  const auto rows = csv_rows(slurp(tmp.path() / "homophily_sweep.csv"));
  ASSERT_EQ(rows.size(), 11u);
  for (int d = 1; d <= 10; ++d) {
    EXPECT_EQ(std::stod(rows[d][0]), d);
    EXPECT_EQ(std::stoll(rows[d][1]), 60 * d);
    const double expected = std::stod(rows[d][4]);
    EXPECT_GT(expected, 0.0);
    EXPECT_LE(expected, 1.0);
  }
}
