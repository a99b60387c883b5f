#include "samgog/graph_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "samgog/errors.hpp"
#include "samgog/rng.hpp"

namespace samgog {

namespace fs = std::filesystem;

std::string to_string(FeatureScheme scheme) {
  switch (scheme) {
    case FeatureScheme::none: return "none";
    case FeatureScheme::node_label_onehot: return "node-label-onehot";
    case FeatureScheme::degree_onehot: return "degree-onehot";
  }
  return "unknown";
}

FeatureScheme feature_scheme_from_string(const std::string& name) {
  if (name == "node-label-onehot") return FeatureScheme::node_label_onehot;
  if (name == "degree-onehot") return FeatureScheme::degree_onehot;
  if (name == "none") return FeatureScheme::none;
  throw ConfigError("unknown feature scheme '" + name + "'");
}

std::vector<int> InputGraph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(num_nodes), 0);
  for (const auto& [u, v] : edges) {
    ++deg[static_cast<std::size_t>(u)];
    ++deg[static_cast<std::size_t>(v)];
  }
  return deg;
}

std::vector<int> GraphDataset::sizes() const {
  std::vector<int> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.push_back(g.num_nodes);
  return out;
}

std::vector<int> GraphDataset::labels() const {
  std::vector<int> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) {
    if (!g.label) throw DegenerateError("graph " + std::to_string(g.id) + " has no label");
    out.push_back(*g.label);
  }
  return out;
}

void GraphDataset::validate() const {
  for (const auto& g : graphs) {
    const std::string where = "graph " + std::to_string(g.id) + ": ";
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const auto [u, v] = g.edges[e];
      if (u < 0 || v < 0 || u >= g.num_nodes || v >= g.num_nodes)
        throw IntegrityError(where + "edge endpoint out of range");
      if (u >= v) throw IntegrityError(where + "edge not canonical (min, max)");
      if (e > 0 && g.edges[e - 1] >= g.edges[e]) throw IntegrityError(where + "edges unsorted or duplicated");
    }
    if (feature_scheme != FeatureScheme::none) {
      if (g.features.rows() != g.num_nodes) throw IntegrityError(where + "feature rows differ from size");
      if (g.features.cols() != feature_dim) throw IntegrityError(where + "feature_dim mismatch");
    }
    if (g.label && (*g.label < 0 || *g.label >= num_classes))
      throw IntegrityError(where + "label outside [0, num_classes)");
    if (!g.node_labels.empty() && static_cast<int>(g.node_labels.size()) != g.num_nodes)
      throw IntegrityError(where + "node label count differs from size");
  }
}

void SplitSpec::validate(const GraphDataset& dataset) const {
  std::vector<char> seen(dataset.size(), 0);
  auto check = [&](const std::vector<int>& idx, const char* which) {
    for (const int i : idx) {
      if (i < 0 || static_cast<std::size_t>(i) >= dataset.size())
        throw IntegrityError(std::string("split: ") + which + " index " + std::to_string(i) + " out of range");
      if (seen[static_cast<std::size_t>(i)]++)
        throw IntegrityError(std::string("split: index ") + std::to_string(i) + " appears twice");
    }
  };
  check(train_idx, "train");
  check(val_idx, "val");
  check(test_idx, "test");
  for (const int i : train_idx) {
    if (!dataset.graphs[static_cast<std::size_t>(i)].label)
      throw IntegrityError("split: train index " + std::to_string(i) + " is unlabeled");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

long long parse_int(std::string_view token, const fs::path& file, std::size_t line_no) {
  token = trim(token);
  long long value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end || token.empty()) {
    throw ParseError(file.filename().string() + ":" + std::to_string(line_no) + ": expected an integer, got '" +
                     std::string(token) + "'");
  }
  return value;
}

std::ifstream open_required(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("missing or unreadable file: " + file.string());
  return in;
}

// One integer per non-empty line.
std::vector<long long> read_int_column(const fs::path& file) {
  auto in = open_required(file);
  std::vector<long long> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    out.push_back(parse_int(line, file, line_no));
  }
  return out;
}

// Maps arbitrary integer values to contiguous ids in ascending value order.
std::vector<int> remap_contiguous(const std::vector<long long>& values, std::vector<long long>& distinct) {
  std::set<long long> uniq(values.begin(), values.end());
  distinct.assign(uniq.begin(), uniq.end());
  std::vector<int> out;
  out.reserve(values.size());
  for (const auto v : values) {
    out.push_back(static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), v) - distinct.begin()));
  }
  return out;
}

fs::path resolve_dataset_dir(const fs::path& root, const std::string& name) {
  if (fs::exists(root / (name + "_A.txt"))) return root;
  if (fs::exists(root / name / (name + "_A.txt"))) return root / name;
  return root;
}

}  // namespace

GraphDataset parse_tudataset(const fs::path& root, const std::string& name) {
  const fs::path dir = resolve_dataset_dir(root, name);
  const fs::path edge_file = dir / (name + "_A.txt");
  const fs::path indicator_file = dir / (name + "_graph_indicator.txt");
  const fs::path label_file = dir / (name + "_graph_labels.txt");
  const fs::path node_label_file = dir / (name + "_node_labels.txt");

  for (const auto& f : {edge_file, indicator_file, label_file}) {
    if (!fs::exists(f)) throw ParseError("missing mandatory file: " + f.string());
  }

  const auto indicator = read_int_column(indicator_file);
  const auto raw_labels = read_int_column(label_file);
  const std::size_t num_graphs = raw_labels.size();

  GraphDataset ds;
  ds.name = name;
  ds.graphs.resize(num_graphs);
  std::vector<int> local_index(indicator.size());
  for (std::size_t node = 0; node < indicator.size(); ++node) {
    const long long gid = indicator[node];
    if (gid < 1 || static_cast<std::size_t>(gid) > num_graphs) {
      throw IntegrityError(indicator_file.filename().string() + ":" + std::to_string(node + 1) + ": graph id " +
                           std::to_string(gid) + " outside [1, " + std::to_string(num_graphs) + "]");
    }
    auto& g = ds.graphs[static_cast<std::size_t>(gid - 1)];
    local_index[node] = g.num_nodes++;
  }

  const auto labels = remap_contiguous(raw_labels, ds.class_values);
  ds.num_classes = static_cast<int>(ds.class_values.size());
  for (std::size_t g = 0; g < num_graphs; ++g) {
    ds.graphs[g].id = static_cast<int>(g);
    ds.graphs[g].label = labels[g];
  }

  {
    auto in = open_required(edge_file);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto text = trim(line);
      if (text.empty()) continue;
      const auto comma = text.find(',');
      if (comma == std::string_view::npos) {
        throw ParseError(edge_file.filename().string() + ":" + std::to_string(line_no) + ": expected 'u, v'");
      }
      const long long u = parse_int(text.substr(0, comma), edge_file, line_no);
      const long long v = parse_int(text.substr(comma + 1), edge_file, line_no);
      const auto n = static_cast<long long>(indicator.size());
      if (u < 1 || v < 1 || u > n || v > n) {
        throw IntegrityError(edge_file.filename().string() + ":" + std::to_string(line_no) +
                             ": node id outside [1, " + std::to_string(n) + "]");
      }
      const long long gu = indicator[static_cast<std::size_t>(u - 1)];
      const long long gv = indicator[static_cast<std::size_t>(v - 1)];
      if (gu != gv) {
        throw IntegrityError(edge_file.filename().string() + ":" + std::to_string(line_no) + ": edge (" +
                             std::to_string(u) + ", " + std::to_string(v) + ") joins graphs " +
                             std::to_string(gu) + " and " + std::to_string(gv));
      }
      const int a = local_index[static_cast<std::size_t>(u - 1)];
      const int b = local_index[static_cast<std::size_t>(v - 1)];
      if (a == b) continue;  // self-loops carry nothing for the encoders
      ds.graphs[static_cast<std::size_t>(gu - 1)].edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  for (auto& g : ds.graphs) {
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  }

  if (fs::exists(node_label_file)) {
    const auto raw = read_int_column(node_label_file);
    if (raw.size() != indicator.size()) {
      throw IntegrityError(node_label_file.filename().string() + ": " + std::to_string(raw.size()) +
                           " labels for " + std::to_string(indicator.size()) + " nodes");
    }
    const auto node_labels = remap_contiguous(raw, ds.node_label_values);
    ds.num_node_labels = static_cast<int>(ds.node_label_values.size());
    for (auto& g : ds.graphs) g.node_labels.assign(static_cast<std::size_t>(g.num_nodes), 0);
    for (std::size_t node = 0; node < indicator.size(); ++node) {
      auto& g = ds.graphs[static_cast<std::size_t>(indicator[node] - 1)];
      g.node_labels[static_cast<std::size_t>(local_index[node])] = node_labels[node];
    }
  }

  ds.validate();
  return ds;
}

void write_tudataset(const GraphDataset& dataset, const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream edges(dir / (name + "_A.txt"));
  std::ofstream indicator(dir / (name + "_graph_indicator.txt"));
  std::ofstream labels(dir / (name + "_graph_labels.txt"));
  if (!edges || !indicator || !labels) throw ParseError("cannot write dataset files under " + dir.string());

  std::ofstream node_labels;
  if (dataset.has_node_labels()) node_labels.open(dir / (name + "_node_labels.txt"));

  long long offset = 1;
  for (std::size_t g = 0; g < dataset.size(); ++g) {
    const auto& graph = dataset.graphs[g];
    for (int v = 0; v < graph.num_nodes; ++v) indicator << (g + 1) << '\n';
    for (const auto& [u, v] : graph.edges) {
      edges << (offset + u) << ", " << (offset + v) << '\n';
      edges << (offset + v) << ", " << (offset + u) << '\n';
    }
    const int label = graph.label.value_or(0);
    const long long raw = dataset.class_values.empty() ? label : dataset.class_values[static_cast<std::size_t>(label)];
    labels << raw << '\n';
    if (dataset.has_node_labels()) {
      for (const int l : graph.node_labels) {
        node_labels << (dataset.node_label_values.empty() ? l : dataset.node_label_values[static_cast<std::size_t>(l)])
                    << '\n';
      }
    }
    offset += graph.num_nodes;
  }
}

GraphDataset build_features(GraphDataset dataset, FeatureScheme scheme, int degree_cap) {
  switch (scheme) {
    case FeatureScheme::none:
      for (auto& g : dataset.graphs) g.features.resize(0, 0);
      dataset.feature_dim = 0;
      break;
    case FeatureScheme::node_label_onehot: {
      if (!dataset.has_node_labels())
        throw ConfigError("node-label-onehot features requested but the dataset has no node labels");
      dataset.feature_dim = dataset.num_node_labels;
      for (auto& g : dataset.graphs) {
        g.features = Matrix::Zero(g.num_nodes, dataset.feature_dim);
        for (int v = 0; v < g.num_nodes; ++v) g.features(v, g.node_labels[static_cast<std::size_t>(v)]) = 1.0;
      }
      break;
    }
    case FeatureScheme::degree_onehot: {
      if (degree_cap < 1) throw ConfigError("degree cap must be at least 1");
      int max_degree = 0;
      std::vector<std::vector<int>> degrees;
      degrees.reserve(dataset.size());
      for (const auto& g : dataset.graphs) {
        degrees.push_back(g.degrees());
        for (const int d : degrees.back()) max_degree = std::max(max_degree, d);
      }
      dataset.feature_dim = std::min(max_degree + 1, degree_cap);
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        auto& g = dataset.graphs[i];
        g.features = Matrix::Zero(g.num_nodes, dataset.feature_dim);
        for (int v = 0; v < g.num_nodes; ++v) {
          g.features(v, std::min(degrees[i][static_cast<std::size_t>(v)], dataset.feature_dim - 1)) = 1.0;
        }
      }
      break;
    }
  }
  dataset.feature_scheme = scheme;
  return dataset;
}

double compute_class_imbalance_ratio(const GraphDataset& dataset, const std::vector<int>& train_idx) {
  if (dataset.num_classes < 1) throw DegenerateError("class imbalance ratio: dataset has no classes");
  std::vector<long long> counts(static_cast<std::size_t>(dataset.num_classes), 0);
  for (const int i : train_idx) {
    const auto& label = dataset.graphs.at(static_cast<std::size_t>(i)).label;
    if (!label) throw DegenerateError("class imbalance ratio: train index " + std::to_string(i) + " is unlabeled");
    ++counts[static_cast<std::size_t>(*label)];
  }
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  if (*lo == 0) {
    throw DegenerateError("class imbalance ratio undefined: class " + std::to_string(lo - counts.begin()) +
                          " is absent from the train set");
  }
  return static_cast<double>(*hi) / static_cast<double>(*lo);
}

HeadTailPartition head_tail_partition(const std::vector<int>& sizes) {
  const std::size_t n = sizes.size();
  if (n < 5) throw DegenerateError("head/tail partition needs at least 5 graphs, got " + std::to_string(n));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto sa = sizes[static_cast<std::size_t>(a)];
    const auto sb = sizes[static_cast<std::size_t>(b)];
    return sa != sb ? sa < sb : a < b;
  });
  const auto head_count = static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(n) - 1e-12));
  HeadTailPartition out;
  out.tail.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(head_count));
  out.head.assign(order.end() - static_cast<std::ptrdiff_t>(head_count), order.end());
  std::sort(out.head.begin(), out.head.end());
  std::sort(out.tail.begin(), out.tail.end());
  return out;
}

HeadTailPartition head_tail_partition(const GraphDataset& dataset) { return head_tail_partition(dataset.sizes()); }

double compute_size_imbalance_ratio(const std::vector<int>& sizes) {
  const auto part = head_tail_partition(sizes);
  auto mean = [&](const std::vector<int>& idx) {
    double sum = 0.0;
    for (const int i : idx) sum += sizes[static_cast<std::size_t>(i)];
    return sum / static_cast<double>(idx.size());
  };
  const double tail_mean = mean(part.tail);
  if (tail_mean <= 0.0) throw DegenerateError("size imbalance ratio undefined: tail graphs are empty");
  return mean(part.head) / tail_mean;
}

double compute_size_imbalance_ratio(const GraphDataset& dataset) {
  return compute_size_imbalance_ratio(dataset.sizes());
}

SplitSpec make_class_imbalanced_split(const GraphDataset& dataset, double rho_class, double train_fraction,
                                      double val_fraction, std::uint64_t seed) {
  if (dataset.num_classes != 2) throw ConfigError("class-imbalanced splits require a binary dataset");
  if (!(rho_class >= 1.0)) throw ConfigError("rho_class must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must be in (0, 1)");
  if (!(val_fraction >= 0.0 && train_fraction + val_fraction <= 1.0))
    throw ConfigError("val_fraction must be >= 0 and train_fraction + val_fraction <= 1");

  std::vector<int> by_class[2];
  for (const auto& g : dataset.graphs) {
    if (g.label) by_class[*g.label].push_back(g.id);
  }
  const int major = by_class[1].size() > by_class[0].size() ? 1 : 0;
  const int minor = 1 - major;
  const auto n_total = static_cast<long long>(dataset.size());
  const auto n_major_avail = static_cast<long long>(by_class[major].size());
  const auto n_minor_avail = static_cast<long long>(by_class[minor].size());

  const auto n_train = static_cast<long long>(std::llround(train_fraction * static_cast<double>(n_total)));
  const auto n_minor = std::max(1LL, static_cast<long long>(std::llround(static_cast<double>(n_train) / (1.0 + rho_class))));
  const long long n_major = n_train - n_minor;
  if (n_major < 1 || n_major > n_major_avail || n_minor > n_minor_avail) {
    std::ostringstream msg;
    msg << "class split infeasible: need " << n_major << " majority + " << n_minor << " minority train graphs, have "
        << n_major_avail << " + " << n_minor_avail;
    const long long min_minor = std::max(1LL, n_train - n_major_avail);
    if (min_minor <= n_minor_avail && n_train - min_minor >= 1) {
      msg << "; max achievable rho_class at this train size is "
          << static_cast<double>(n_train - min_minor) / static_cast<double>(min_minor);
    }
    throw FeasibilityError(msg.str());
  }

  CounterRng rng(derive_seed(seed, {0x5b117ULL}));
  for (auto& members : by_class) shuffle(members, rng);

  SplitSpec split;
  split.seed = seed;
  split.rho_class = static_cast<double>(n_major) / static_cast<double>(n_minor);
  split.train_idx.assign(by_class[major].begin(), by_class[major].begin() + n_major);
  split.train_idx.insert(split.train_idx.end(), by_class[minor].begin(), by_class[minor].begin() + n_minor);

  std::vector<int> rest(by_class[major].begin() + n_major, by_class[major].end());
  rest.insert(rest.end(), by_class[minor].begin() + n_minor, by_class[minor].end());
  for (const auto& g : dataset.graphs) {
    if (!g.label) rest.push_back(g.id);
  }
  std::sort(rest.begin(), rest.end());
  shuffle(rest, rng);
  const auto n_val = std::min<long long>(static_cast<long long>(rest.size()),
                                         std::llround(val_fraction * static_cast<double>(n_total)));
  split.val_idx.assign(rest.begin(), rest.begin() + n_val);
  split.test_idx.assign(rest.begin() + n_val, rest.end());

  std::sort(split.train_idx.begin(), split.train_idx.end());
  std::sort(split.val_idx.begin(), split.val_idx.end());
  std::sort(split.test_idx.begin(), split.test_idx.end());
  if (dataset.size() >= 5) split.rho_size = compute_size_imbalance_ratio(dataset);
  return split;
}

namespace {

void write_index_line(std::ostream& out, const std::vector<int>& idx) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) out << ',';
    out << idx[i];
  }
  out << '\n';
}

std::vector<int> parse_index_line(std::string_view line, std::size_t line_no) {
  std::vector<int> out;
  line = trim(line);
  while (!line.empty()) {
    const auto comma = line.find(',');
    const auto token = line.substr(0, comma);
    out.push_back(static_cast<int>(parse_int(token, "split", line_no)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_optional(const std::optional<double>& v) {
  if (!v) return "NA";
  std::ostringstream s;
  s << std::setprecision(17) << *v;
  return s.str();
}

}  // namespace

void write_split(std::ostream& out, const SplitSpec& split) {
  out << "# rho_class=" << format_optional(split.rho_class) << " rho_size=" << format_optional(split.rho_size)
      << " seed=" << split.seed << '\n';
  write_index_line(out, split.train_idx);
  write_index_line(out, split.val_idx);
  write_index_line(out, split.test_idx);
}

SplitSpec read_split(std::istream& in) {
  SplitSpec split;
  std::string line;
  std::vector<std::vector<int>> lists;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (!text.empty() && text.front() == '#') {
      std::istringstream header{std::string(text.substr(1))};
      std::string field;
      while (header >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const auto key = field.substr(0, eq);
        const auto value = field.substr(eq + 1);
        if (key == "seed") {
          split.seed = std::stoull(value);
        } else if ((key == "rho_class" || key == "rho_size") && value != "NA") {
          (key == "rho_class" ? split.rho_class : split.rho_size) = std::stod(value);
        }
      }
      continue;
    }
    lists.push_back(parse_index_line(text, line_no));
  }
  if (lists.size() != 3) {
    throw ParseError("split file must contain exactly 3 index lines (train/val/test), found " +
                     std::to_string(lists.size()));
  }
  split.train_idx = std::move(lists[0]);
  split.val_idx = std::move(lists[1]);
  split.test_idx = std::move(lists[2]);
  return split;
}

void write_split(const fs::path& path, const SplitSpec& split) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write split file " + path.string());
  write_split(out, split);
}

SplitSpec read_split(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("missing or unreadable file: " + path.string());
  return read_split(in);
}

GraphDataset make_planted_dataset(const PlantedConfig& config, std::uint64_t seed) {
  if (config.num_graphs < 2 || config.num_node_labels < 2 || config.min_nodes < 1 ||
      config.max_nodes < config.min_nodes || config.signal < 0.0 || config.signal > 1.0) {
    throw ConfigError("invalid planted dataset configuration");
  }
  CounterRng rng(derive_seed(seed, {0x91a47ULL}));
  GraphDataset ds;
  ds.name = "planted";
  ds.num_classes = 2;
  ds.class_values = {0, 1};
  ds.num_node_labels = config.num_node_labels;
  ds.node_label_values.resize(static_cast<std::size_t>(config.num_node_labels));
  std::iota(ds.node_label_values.begin(), ds.node_label_values.end(), 0LL);

  const auto n_class1 =
      static_cast<int>(std::llround(config.class1_fraction * static_cast<double>(config.num_graphs)));
  std::vector<int> labels(static_cast<std::size_t>(config.num_graphs), 0);
  std::fill(labels.end() - n_class1, labels.end(), 1);
  shuffle(labels, rng);

  for (int gi = 0; gi < config.num_graphs; ++gi) {
    InputGraph g;
    g.id = gi;
    g.label = labels[static_cast<std::size_t>(gi)];
    g.num_nodes = config.min_nodes + static_cast<int>(rng.below(static_cast<std::uint64_t>(config.max_nodes - config.min_nodes + 1)));
    // Class c owns the node labels l with l % 2 == c.
    const int block = (config.num_node_labels + 1 - *g.label) / 2;
    for (int v = 0; v < g.num_nodes; ++v) {
      int l = 0;
      if (rng.uniform() < config.signal) {
        l = 2 * static_cast<int>(rng.below(static_cast<std::uint64_t>(block))) + *g.label;
      } else {
        l = static_cast<int>(rng.below(static_cast<std::uint64_t>(config.num_node_labels)));
      }
      g.node_labels.push_back(l);
    }
    for (int v = 1; v < g.num_nodes; ++v) {
      g.edges.emplace_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(v))), v);
    }
    for (int u = 0; u < g.num_nodes; ++u) {
      for (int v = u + 1; v < g.num_nodes; ++v) {
        if (rng.uniform() < config.edge_prob) g.edges.emplace_back(u, v);
      }
    }
    for (auto& e : g.edges) e = {std::min(e.first, e.second), std::max(e.first, e.second)};
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    ds.graphs.push_back(std::move(g));
  }
  ds.validate();
  return ds;
}

}  // namespace samgog
