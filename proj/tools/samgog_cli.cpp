// samgog command-line front end.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "samgog/errors.hpp"
#include "samgog/experiment.hpp"
#include "samgog/theory_checks.hpp"

namespace fs = std::filesystem;
using namespace samgog;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "INI experiment config");
  cmd->add_option("--seed", opts.seed, "master seed (overrides the config)");
  cmd->add_option("--out", opts.out, "output directory (overrides the config)");
}

// Config from --config, or a dataset-only config built from flags.
ExperimentConfig resolve_config(const CommonOptions& opts, const std::string& dataset, const std::string& name,
                                bool planted) {
  ExperimentConfig config;
  if (!opts.config.empty()) {
    config = load_experiment_config(opts.config);
  } else if (planted) {
    config.dataset_source = "planted";
  } else if (!dataset.empty()) {
    config.dataset_path = dataset;
    config.dataset_name = name.empty() ? fs::path(dataset).filename().string() : name;
  } else {
    throw ConfigError("--config is required");
  }
  if (opts.seed) {
    config.seed = *opts.seed;
    config.split_seed = *opts.seed;
    config.planted_seed = *opts.seed;
  }
  if (!opts.out.empty()) config.out_dir = opts.out;
  return config;
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-of-graphs sampling for imbalanced graph classification"};
  app.require_subcommand(1);

  CommonOptions train_opts, sweep_opts, theory_opts, split_opts, inspect_opts;

  auto* train = app.add_subcommand("train", "train and evaluate `train.runs` seeded runs");
  add_common(train, train_opts);
  int parallel = 0;
  bool dump = false;
  train->add_option("--parallel-runs", parallel, "run this many repetitions concurrently");
  train->add_flag("--dump", dump, "also write per-run allocation and GoG files");

  auto* sweep = app.add_subcommand("sweep-homophily", "edge homophily of sampled GoGs across average degrees");
  add_common(sweep, sweep_opts);
  std::vector<double> degrees{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  sweep->add_option("--degrees", degrees, "average degrees to sweep")->delimiter(',');

  auto* theory = app.add_subcommand("theory", "randomized checks of the sampling and allocation results");
  add_common(theory, theory_opts);
  std::string check = "all";
  int trials = 0;
  int replicates = 30;
  theory->add_option("--check", check, "lemma1, theorem1, monotonicity, theorem2 or all")
      ->check(CLI::IsMember({"lemma1", "theorem1", "monotonicity", "theorem2", "all"}));
  theory->add_option("--trials", trials, "trial count (0 = per-check default)");
  theory->add_option("--replicates", replicates, "replicates per t for theorem2");

  auto* split = app.add_subcommand("make-split", "generate a class-imbalanced split file");
  add_common(split, split_opts);
  std::string split_dataset, split_name;
  bool split_planted = false;
  std::optional<double> rho, train_fraction, val_fraction;
  split->add_option("--dataset", split_dataset, "TUDataset directory (without --config)");
  split->add_option("--name", split_name, "TUDataset name");
  split->add_flag("--planted", split_planted, "use the planted synthetic dataset");
  split->add_option("--rho", rho, "majority:minority train ratio");
  split->add_option("--train-fraction", train_fraction);
  split->add_option("--val-fraction", val_fraction);

  auto* inspect = app.add_subcommand("inspect-dataset", "print dataset statistics");
  add_common(inspect, inspect_opts);
  std::string inspect_dataset, inspect_name;
  bool inspect_planted = false;
  inspect->add_option("--dataset", inspect_dataset, "TUDataset directory (without --config)");
  inspect->add_option("--name", inspect_name, "TUDataset name");
  inspect->add_flag("--planted", inspect_planted, "use the planted synthetic dataset");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      auto config = resolve_config(train_opts, "", "", false);
      if (parallel > 0) config.parallel_runs = parallel;
      if (dump) config.dump_gog = config.dump_allocation = true;
      const int status = run_experiment(config, std::cerr);
      if (status == 0) std::cout << "wrote " << (config.out_dir / "metrics.csv").string() << '\n';
      return status;
    }
    if (*sweep) {
      const auto config = resolve_config(sweep_opts, "", "", false);
      const int status = emit_homophily_sweep(config, degrees, std::cerr);
      if (status == 0) std::cout << "wrote " << (config.out_dir / "homophily_sweep.csv").string() << '\n';
      return status;
    }
    if (*theory) {
      const std::uint64_t seed = theory_opts.seed.value_or(0);
      const fs::path out = theory_opts.out.empty() ? fs::path("out") : fs::path(theory_opts.out);
      nlohmann::json report;
      bool ok = true;
      auto run = [&](const std::string& name, const CheckReport& r) {
        report[name] = r.to_json();
        ok = ok && r.passed;
        std::cout << name << ": " << (r.passed ? "pass" : "FAIL") << " (" << r.trials << " trials, " << r.failures
                  << " failures) " << r.detail << '\n';
      };
      if (check == "lemma1" || check == "all") run("lemma1", check_lemma1(trials ? trials : 500, 6, seed));
      if (check == "theorem1" || check == "all")
        run("theorem1", check_theorem1_unbiasedness(trials ? trials : 10000, 10, seed));
      if (check == "monotonicity" || check == "all")
        run("monotonicity", check_rule_monotonicity(trials ? trials : 1000, seed));
      if (check == "theorem2" || check == "all") {
        const std::vector<int> ts{1, 2, 4, 8, 16, 32};
        const auto sweep_result = check_theorem2_variance(ts, replicates, seed);
        report["theorem2"] = sweep_result.to_json();
        const bool pass = theorem2_passes(sweep_result);
        ok = ok && pass;
        std::cout << "theorem2: " << (pass ? "pass" : "FAIL") << " slope " << sweep_result.fitted_slope << " r2 "
                  << sweep_result.r_squared << '\n';
      }
      write_json(out / "theory.json", report);
      return ok ? 0 : 1;
    }
    if (*split) {
      auto config = resolve_config(split_opts, split_dataset, split_name, split_planted);
      if (rho) config.rho_class = *rho;
      if (train_fraction) config.train_fraction = *train_fraction;
      if (val_fraction) config.val_fraction = *val_fraction;
      config.split_file.reset();
      const auto dataset = load_experiment_dataset(config);
      const auto spec = load_experiment_split(config, dataset);
      fs::create_directories(config.out_dir);
      write_split(config.out_dir / "split.txt", spec);
      std::cout << "train " << spec.train_idx.size() << " val " << spec.val_idx.size() << " test "
                << spec.test_idx.size() << " rho_class " << compute_class_imbalance_ratio(dataset, spec.train_idx)
                << '\n';
      return 0;
    }
    if (*inspect) {
      const auto config = resolve_config(inspect_opts, inspect_dataset, inspect_name, inspect_planted);
      const auto dataset = load_experiment_dataset(config);
      std::map<int, int> class_counts;
      for (int y : dataset.labels()) ++class_counts[y];
      const auto sizes = dataset.sizes();
      std::size_t edges = 0;
      for (const auto& g : dataset.graphs) edges += g.edges.size();
      nlohmann::json info{{"name", dataset.name},
                          {"graphs", dataset.size()},
                          {"classes", dataset.num_classes},
                          {"class_values", dataset.class_values},
                          {"node_label_values", dataset.num_node_labels},
                          {"feature_dim", dataset.feature_dim},
                          {"mean_nodes", dataset.size() ? 1.0 * std::accumulate(sizes.begin(), sizes.end(), 0LL) /
                                                              static_cast<double>(dataset.size())
                                                        : 0.0},
                          {"min_nodes", sizes.empty() ? 0 : *std::min_element(sizes.begin(), sizes.end())},
                          {"max_nodes", sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end())},
                          {"undirected_edges", edges}};
      nlohmann::json counts = nlohmann::json::array();
      for (const auto& [c, n] : class_counts) counts.push_back(n);
      info["class_counts"] = counts;
      if (dataset.size() >= 5) info["rho_size"] = compute_size_imbalance_ratio(dataset);
      std::cout << info.dump(2) << '\n';
      if (!inspect_opts.out.empty()) write_json(fs::path(inspect_opts.out) / "dataset.json", info);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
