#include "samgog/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"
#include "samgog/errors.hpp"
#include "samgog/rng.hpp"

namespace samgog {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKnownKeys = {
    "dataset.source",         "dataset.path",          "dataset.name",          "dataset.features",
    "dataset.seed",           "planted.num_graphs",    "planted.class1_fraction", "planted.num_node_labels",
    "planted.min_nodes",      "planted.max_nodes",     "planted.edge_prob",     "planted.signal",
    "split.file",             "split.rho_class",       "split.train_fraction",  "split.val_fraction",
    "split.seed",             "alloc.d_bar",           "alloc.k_min",           "alloc.k_max",
    "alloc.rho1",             "alloc.rho2",            "alloc.window_r",        "alloc.rule2_per_capita",
    "encoder.arch",           "encoder.num_layers",    "encoder.hidden_dim",    "encoder.dropout",
    "encoder.epsilon_gin",    "encoder.readout",       "encoder.optimizer",     "encoder.learning_rate",
    "encoder.schedule",       "encoder.weight_decay",  "sampler.mode",          "sampler.samples_per_epoch",
    "sampler.num_threads",    "downstream.num_layers", "downstream.hidden_dim", "downstream.dropout",
    "downstream.symmetrize",  "downstream.optimizer",  "downstream.learning_rate", "downstream.schedule",
    "downstream.weight_decay", "train.epochs",         "train.eval_samples",    "train.select_best",
    "train.runs",             "train.parallel_runs",   "train.seed",            "output.dir",
    "output.dump_gog",        "output.dump_allocation"};

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <typename T>
  void get(const std::string& key, T& target) const {
    const auto raw = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (raw) target = convert<T>(key, *raw);
  }

  template <typename T>
  void require(const std::string& key, T& target) const {
    const auto raw = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!raw) throw ConfigError("missing required key " + key);
    target = convert<T>(key, *raw);
  }

  template <typename E>
  void get_enum(const std::string& key, E& target, E (*parse)(const std::string&)) const {
    std::string raw;
    get(key, raw);
    if (raw.empty()) return;
    try {
      target = parse(raw);
    } catch (const std::exception& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }

 private:
  template <typename T>
  static T convert(const std::string& key, const std::string& raw) {
    if constexpr (std::is_same_v<T, std::string>) {
      return raw;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (raw == "true" || raw == "1") return true;
      if (raw == "false" || raw == "0") return false;
      throw ConfigError(key + ": expected true or false, got '" + raw + "'");
    } else {
      std::istringstream in(raw);
      T value{};
      in >> value;
      if (in.fail() || !(in >> std::ws).eof()) throw ConfigError(key + ": cannot parse '" + raw + "'");
      return value;
    }
  }

  const pt::ptree& tree_;
};

void read_optimizer(const Reader& r, const std::string& section, OptimizerConfig& opt) {
  r.get_enum(section + ".optimizer", opt.kind, optimizer_kind_from_string);
  r.get(section + ".learning_rate", opt.learning_rate);
  r.get_enum(section + ".schedule", opt.schedule, lr_schedule_from_string);
  r.get(section + ".weight_decay", opt.weight_decay);
}

std::string fmt(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

std::vector<double> metric_values(const RunOutcome& o) {
  const auto& m = o.result.metrics;
  const auto& e = o.result.encoder_only;
  return {m.accuracy,           m.balanced_accuracy,  m.macro_f1,   m.head_accuracy,
          m.tail_accuracy,      m.edge_homophily_mean, m.edge_homophily_std, e.accuracy,
          e.balanced_accuracy,  static_cast<double>(o.result.best_epoch)};
}

void mean_std(std::span<const RunOutcome> runs, std::vector<double>& mean, std::vector<double>& stddev) {
  const std::size_t width = metric_values(runs.front()).size();
  mean.assign(width, 0.0);
  stddev.assign(width, 0.0);
  for (const auto& o : runs) {
    const auto v = metric_values(o);
    for (std::size_t c = 0; c < width; ++c) mean[c] += v[c];
  }
  for (auto& m : mean) m /= static_cast<double>(runs.size());
  if (runs.size() < 2) return;
  for (const auto& o : runs) {
    const auto v = metric_values(o);
    for (std::size_t c = 0; c < width; ++c) stddev[c] += (v[c] - mean[c]) * (v[c] - mean[c]);
  }
  for (auto& s : stddev) s = std::sqrt(s / static_cast<double>(runs.size() - 1));
}

template <std::size_t N>
void write_header(std::ostream& out, const char* const (&columns)[N]) {
  for (std::size_t i = 0; i < N; ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
}

nlohmann::json metrics_json(const MetricsReport& m) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json per_class = nlohmann::json::array();
  for (double v : m.per_class_accuracy) per_class.push_back(num(v));
  return {{"accuracy", num(m.accuracy)},
          {"balanced_accuracy", num(m.balanced_accuracy)},
          {"macro_f1", num(m.macro_f1)},
          {"per_class_accuracy", per_class},
          {"head_accuracy", num(m.head_accuracy)},
          {"tail_accuracy", num(m.tail_accuracy)},
          {"edge_homophily_mean", num(m.edge_homophily_mean)},
          {"edge_homophily_std", num(m.edge_homophily_std)}};
}

void open_for_write(std::ofstream& out, const std::filesystem::path& path) {
  out.open(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
}

struct RunSetup {
  TrainConfig train;
  SamplerConfig sampler;
};

RunSetup setup_for_run(const ExperimentConfig& config, std::uint64_t seed) {
  RunSetup s{config.train, config.sampler};
  s.train.seed = derive_seed(seed, {1});
  s.sampler.seed = derive_seed(seed, {2});
  return s;
}

SimilarityMatrix final_similarity(const GraphDataset& dataset, const SplitSpec& split, const EncoderConfig& enc,
                                  const ParamSet& params) {
  const Encoder encoder(enc, dataset.feature_dim, dataset.num_classes);
  const auto graphs = prepare_graphs(dataset);
  const auto pass = encode_dataset(encoder, params, graphs, Mode::eval);
  return similarity_matrix(build_prob_matrix(pass.logits, masked_labels(dataset, split.train_idx)), true);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset_source != "tudataset" && dataset_source != "planted")
    throw ConfigError("dataset.source must be tudataset or planted");
  if (dataset_source == "tudataset" && (dataset_path.empty() || dataset_name.empty()))
    throw ConfigError("dataset.path and dataset.name are required for tudataset sources");
  if (!split_file) {
    if (!(rho_class >= 1.0)) throw ConfigError("split.rho_class must be >= 1");
    if (!(train_fraction > 0.0) || !(val_fraction >= 0.0) || train_fraction + val_fraction >= 1.0)
      throw ConfigError("split fractions must satisfy 0 < train, 0 <= val, train + val < 1");
  }
  if (runs < 1) throw ConfigError("train.runs must be >= 1");
  if (parallel_runs < 1) throw ConfigError("train.parallel_runs must be >= 1");
  alloc.validate();
  encoder.validate();
  sampler.validate();
  downstream.validate();
  train.validate();
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' is outside any section");
    for (const auto& [key, value] : body) {
      (void)value;
      if (!kKnownKeys.count(section + "." + key)) throw ConfigError("config: unknown key " + section + "." + key);
    }
  }

  ExperimentConfig c;
  const Reader r(tree);
  r.get("dataset.source", c.dataset_source);
  std::string path;
  r.get("dataset.path", path);
  c.dataset_path = path;
  r.get("dataset.name", c.dataset_name);
  r.get_enum("dataset.features", c.features, feature_scheme_from_string);
  r.get("dataset.seed", c.planted_seed);
  r.get("planted.num_graphs", c.planted.num_graphs);
  r.get("planted.class1_fraction", c.planted.class1_fraction);
  r.get("planted.num_node_labels", c.planted.num_node_labels);
  r.get("planted.min_nodes", c.planted.min_nodes);
  r.get("planted.max_nodes", c.planted.max_nodes);
  r.get("planted.edge_prob", c.planted.edge_prob);
  r.get("planted.signal", c.planted.signal);

  std::string split_file;
  r.get("split.file", split_file);
  if (!split_file.empty()) c.split_file = split_file;
  r.get("split.rho_class", c.rho_class);
  r.get("split.train_fraction", c.train_fraction);
  r.get("split.val_fraction", c.val_fraction);
  r.get("split.seed", c.split_seed);

  r.require("alloc.d_bar", c.alloc.d_bar);
  r.get("alloc.k_min", c.alloc.k_min);
  r.get("alloc.k_max", c.alloc.k_max);
  r.get("alloc.rho1", c.alloc.rho1);
  r.get("alloc.rho2", c.alloc.rho2);
  r.get("alloc.window_r", c.alloc.window_r);
  r.get("alloc.rule2_per_capita", c.alloc.rule2_per_capita);

  r.get_enum("encoder.arch", c.encoder.arch, encoder_arch_from_string);
  r.get("encoder.num_layers", c.encoder.num_layers);
  r.get("encoder.hidden_dim", c.encoder.hidden_dim);
  r.get("encoder.dropout", c.encoder.dropout);
  r.get("encoder.epsilon_gin", c.encoder.epsilon_gin);
  r.get_enum("encoder.readout", c.encoder.readout, readout_from_string);
  read_optimizer(r, "encoder", c.train.encoder_optimizer);

  r.get_enum("sampler.mode", c.sampler.mode, sample_mode_from_string);
  r.get("sampler.samples_per_epoch", c.sampler.samples_per_epoch);
  r.get("sampler.num_threads", c.sampler.num_threads);

  r.get("downstream.num_layers", c.downstream.num_layers);
  r.get("downstream.hidden_dim", c.downstream.hidden_dim);
  r.get("downstream.dropout", c.downstream.dropout);
  r.get("downstream.symmetrize", c.downstream.symmetrize);
  read_optimizer(r, "downstream", c.train.downstream_optimizer);

  r.get("train.epochs", c.train.epochs);
  r.get("train.eval_samples", c.train.eval_samples);
  r.get("train.select_best", c.train.select_best);
  r.get("train.runs", c.runs);
  r.get("train.parallel_runs", c.parallel_runs);
  r.get("train.seed", c.seed);

  std::string out_dir;
  r.get("output.dir", out_dir);
  if (!out_dir.empty()) c.out_dir = out_dir;
  r.get("output.dump_gog", c.dump_gog);
  r.get("output.dump_allocation", c.dump_allocation);

  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  auto config = parse_experiment_config(in);
  // Relative dataset and split paths resolve against the config's directory.
  const auto base = path.parent_path();
  if (!config.dataset_path.empty() && config.dataset_path.is_relative()) config.dataset_path = base / config.dataset_path;
  if (config.split_file && config.split_file->is_relative()) config.split_file = base / *config.split_file;
  return config;
}

GraphDataset load_experiment_dataset(const ExperimentConfig& config) {
  GraphDataset raw = config.dataset_source == "planted" ? make_planted_dataset(config.planted, config.planted_seed)
                                                        : parse_tudataset(config.dataset_path, config.dataset_name);
  return build_features(std::move(raw), config.features);
}

SplitSpec load_experiment_split(const ExperimentConfig& config, const GraphDataset& dataset) {
  SplitSpec split = config.split_file ? read_split(*config.split_file)
                                      : make_class_imbalanced_split(dataset, config.rho_class, config.train_fraction,
                                                                    config.val_fraction, config.split_seed);
  split.validate(dataset);
  return split;
}

std::uint64_t run_seed(std::uint64_t master, int run) noexcept {
  return derive_seed(master, {static_cast<std::uint64_t>(run)});
}

std::vector<RunOutcome> run_all(const ExperimentConfig& config, const GraphDataset& dataset, const SplitSpec& split) {
  std::vector<std::optional<RunOutcome>> slots(static_cast<std::size_t>(config.runs));
  std::vector<std::exception_ptr> errors(slots.size());
  auto execute = [&](int r) {
    try {
      const auto seed = run_seed(config.seed, r);
      const auto setup = setup_for_run(config, seed);
      slots[static_cast<std::size_t>(r)] =
          RunOutcome{r, seed,
                     train_full_pipeline(dataset, split, config.alloc, config.encoder, setup.sampler, config.downstream,
                                         setup.train)};
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  };
  if (config.parallel_runs <= 1) {
    for (int r = 0; r < config.runs; ++r) execute(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> workers;
    for (int w = 0; w < std::min(config.parallel_runs, config.runs); ++w) {
      workers.emplace_back([&] {
        for (int r = next++; r < config.runs; r = next++) execute(r);
      });
    }
  }
  for (std::size_t r = 0; r < errors.size(); ++r) {
    if (errors[r]) {
      try {
        std::rethrow_exception(errors[r]);
      } catch (const std::exception& e) {
        throw TrainingError("run " + std::to_string(r) + " failed: " + e.what());
      }
    }
  }
  std::vector<RunOutcome> outcomes;
  for (auto& s : slots) outcomes.push_back(std::move(*s));
  return outcomes;
}

void write_metrics_csv(std::ostream& out, std::span<const RunOutcome> runs) {
  write_header(out, kMetricsColumns);
  for (const auto& o : runs) {
    out << o.run << ',' << o.seed;
    for (double v : metric_values(o)) out << ',' << fmt(v);
    out << '\n';
  }
  if (runs.empty()) return;
  std::vector<double> mean, stddev;
  mean_std(runs, mean, stddev);
  out << "mean,";
  for (double v : mean) out << ',' << fmt(v);
  out << "\nstd,";
  for (double v : stddev) out << ',' << fmt(v);
  out << '\n';
}

void write_metrics_json(std::ostream& out, std::span<const RunOutcome> runs) {
  nlohmann::json doc;
  doc["runs"] = nlohmann::json::array();
  for (const auto& o : runs) {
    doc["runs"].push_back({{"run", o.run},
                           {"seed", o.seed},
                           {"best_epoch", o.result.best_epoch},
                           {"metrics", metrics_json(o.result.metrics)},
                           {"encoder_only", metrics_json(o.result.encoder_only)}});
  }
  if (!runs.empty()) {
    std::vector<double> mean, stddev;
    mean_std(runs, mean, stddev);
    nlohmann::json m, s;
    constexpr std::size_t first_metric = 2;  // skip run and seed
    for (std::size_t c = 0; c < mean.size(); ++c) {
      const std::string name = kMetricsColumns[c + first_metric];
      m[name] = std::isfinite(mean[c]) ? nlohmann::json(mean[c]) : nlohmann::json(nullptr);
      s[name] = std::isfinite(stddev[c]) ? nlohmann::json(stddev[c]) : nlohmann::json(nullptr);
    }
    doc["summary"] = {{"runs", runs.size()}, {"mean", m}, {"std", s}};
  }
  out << doc.dump(2) << '\n';
}

void write_curve_csv(std::ostream& out, std::span<const RunOutcome> runs) {
  write_header(out, kCurveColumns);
  for (const auto& o : runs) {
    for (const auto& e : o.result.curve) {
      out << o.run << ',' << e.epoch << ',' << fmt(e.encoder_loss) << ',' << fmt(e.downstream_loss) << ','
          << fmt(e.val_balanced_accuracy) << ',' << fmt(e.encoder_val_balanced_accuracy) << ','
          << fmt(e.mean_edge_homophily) << '\n';
    }
  }
}

int run_experiment(const ExperimentConfig& config, std::ostream& err) {
  try {
    config.validate();
    const auto dataset = load_experiment_dataset(config);
    const auto split = load_experiment_split(config, dataset);
    const auto outcomes = run_all(config, dataset, split);

    std::filesystem::create_directories(config.out_dir);
    std::ofstream csv, json, curve;
    open_for_write(csv, config.out_dir / "metrics.csv");
    write_metrics_csv(csv, outcomes);
    open_for_write(json, config.out_dir / "metrics.json");
    write_metrics_json(json, outcomes);
    open_for_write(curve, config.out_dir / "curve.csv");
    write_curve_csv(curve, outcomes);
    for (const auto& o : outcomes) {
      const std::string suffix = "_run" + std::to_string(o.run) + ".txt";
      if (config.dump_allocation) {
        std::ofstream out;
        open_for_write(out, config.out_dir / ("allocation" + suffix));
        write_allocation(out, o.result.allocation);
      }
      if (config.dump_gog) {
        const auto sim = final_similarity(dataset, split, config.encoder, o.result.state.encoder_params);
        const auto setup = setup_for_run(config, o.seed);
        const auto gog = sample_gog(sim, o.result.allocation, setup.sampler,
                                    gog_stream_id(static_cast<std::uint64_t>(config.train.epochs) + 1, 0));
        std::ofstream out;
        open_for_write(out, config.out_dir / ("gog" + suffix));
        write_gog(out, gog);
      }
    }
    for (auto* f : {&csv, &json, &curve}) {
      f->flush();
      if (!*f) throw Error("write failed under " + config.out_dir.string());
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

std::vector<HomophilySweepRow> homophily_sweep(const GraphDataset& dataset, const SplitSpec& split,
                                               const SimilarityMatrix& sim, const AllocConfig& alloc,
                                               const SamplerConfig& sampler, std::span<const double> degree_values,
                                               int samples) {
  if (samples < 1) throw ConfigError("homophily_sweep: samples must be >= 1");
  const auto truth = dataset.labels();
  std::vector<HomophilySweepRow> rows;
  for (std::size_t idx = 0; idx < degree_values.size(); ++idx) {
    AllocConfig cfg = alloc;
    cfg.d_bar = degree_values[idx];
    cfg.k_min = std::min(cfg.k_min, static_cast<int>(std::floor(cfg.d_bar)));
    cfg.k_max = std::max(cfg.k_max, static_cast<int>(std::ceil(cfg.d_bar)));
    const auto allocation = allocate_degrees(split, dataset, cfg);

    HomophilySweepRow row;
    row.d_bar = cfg.d_bar;
    row.total_degree = allocation.total;
    row.samples = samples;
    std::vector<double> values;
    for (int s = 0; s < samples; ++s) {
      const auto gog = sample_gog(sim, allocation, sampler, gog_stream_id(idx, static_cast<std::uint64_t>(s)));
      values.push_back(edge_homophily(gog, truth));
    }
    for (double v : values) row.mean += v;
    row.mean /= samples;
    if (samples > 1) {
      for (double v : values) row.stddev += (v - row.mean) * (v - row.mean);
      row.stddev = std::sqrt(row.stddev / (samples - 1));
    }
    row.expected = expected_homophily(sim, truth, allocation);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const HomophilySweepRow> rows) {
  write_header(out, kSweepColumns);
  for (const auto& r : rows) {
    out << fmt(r.d_bar) << ',' << r.total_degree << ',' << fmt(r.mean) << ',' << fmt(r.stddev) << ','
        << fmt(r.expected) << ',' << r.samples << '\n';
  }
}

int emit_homophily_sweep(const ExperimentConfig& config, std::span<const double> degree_values, std::ostream& err) {
  try {
    config.validate();
    const auto dataset = load_experiment_dataset(config);
    const auto split = load_experiment_split(config, dataset);
    const auto seed = run_seed(config.seed, 0);
    const auto setup = setup_for_run(config, seed);
    ParamSet params;
    if (config.train.epochs > 0) {
      params = train_full_pipeline(dataset, split, config.alloc, config.encoder, setup.sampler, config.downstream,
                                   setup.train)
                   .state.encoder_params;
    } else {
      params = Encoder(config.encoder, dataset.feature_dim, dataset.num_classes)
                   .make_params(derive_seed(setup.train.seed, {1}));
    }
    const auto sim = final_similarity(dataset, split, config.encoder, params);
    const auto rows = homophily_sweep(dataset, split, sim, config.alloc, setup.sampler, degree_values);
    std::filesystem::create_directories(config.out_dir);
    std::ofstream out;
    open_for_write(out, config.out_dir / "homophily_sweep.csv");
    write_sweep_csv(out, rows);
    out.flush();
    if (!out) throw Error("write failed under " + config.out_dir.string());
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace samgog
