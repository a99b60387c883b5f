#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "samgog/matrix.hpp"

namespace samgog {

enum class FeatureScheme { none, node_label_onehot, degree_onehot };

std::string to_string(FeatureScheme scheme);
FeatureScheme feature_scheme_from_string(const std::string& name);

// Undirected edge with first < second.
using Edge = std::pair<int, int>;

// One classification instance: a graph with local node indices 0..num_nodes-1.
struct InputGraph {
  int id = 0;
  int num_nodes = 0;
  std::vector<Edge> edges;          // canonical (min, max), sorted, unique
  std::vector<int> node_labels;     // contiguous node-label ids; empty if absent
  std::optional<int> label;         // contiguous class index
  Matrix features;                  // num_nodes x feature_dim once built

  int size() const noexcept { return num_nodes; }
  std::vector<int> degrees() const;
};

struct GraphDataset {
  std::string name;
  std::vector<InputGraph> graphs;
  int num_classes = 0;
  FeatureScheme feature_scheme = FeatureScheme::none;
  int feature_dim = 0;
  int num_node_labels = 0;                 // 0 when node labels are absent
  std::vector<long long> class_values;     // original label value per class index
  std::vector<long long> node_label_values;

  std::size_t size() const noexcept { return graphs.size(); }
  bool has_node_labels() const noexcept { return num_node_labels > 0; }
  std::vector<int> sizes() const;
  // Label per graph; throws DegenerateError if any graph is unlabeled.
  std::vector<int> labels() const;

  // Checks the type invariants; throws IntegrityError on violation.
  void validate() const;
};

struct SplitSpec {
  std::vector<int> train_idx;
  std::vector<int> val_idx;
  std::vector<int> test_idx;
  std::optional<double> rho_class;
  std::optional<double> rho_size;
  std::uint64_t seed = 0;

  // Disjointness, bounds, and labeled-train checks.
  void validate(const GraphDataset& dataset) const;
};

// Reads <name>_A.txt, <name>_graph_indicator.txt, <name>_graph_labels.txt and
// optionally <name>_node_labels.txt from `root` (or `root/<name>/`).
GraphDataset parse_tudataset(const std::filesystem::path& root, const std::string& name);

// Writes the dataset back in the same format (each undirected edge emitted in
// both directions, original label values restored).
void write_tudataset(const GraphDataset& dataset, const std::filesystem::path& dir,
                     const std::string& name);

inline constexpr int kDefaultDegreeCap = 256;

// Builds one-hot node features. For degree_onehot the dimension is
// min(max degree + 1, degree_cap) and larger degrees land in the last bucket.
GraphDataset build_features(GraphDataset dataset, FeatureScheme scheme,
                            int degree_cap = kDefaultDegreeCap);

double compute_class_imbalance_ratio(const GraphDataset& dataset, const std::vector<int>& train_idx);

// Head = ceil(20%) largest graphs, ordering by (size, id) ascending so that
// equal sizes resolve toward the higher id. Both lists ascending by id.
struct HeadTailPartition {
  std::vector<int> head;
  std::vector<int> tail;
};
HeadTailPartition head_tail_partition(const std::vector<int>& sizes);
HeadTailPartition head_tail_partition(const GraphDataset& dataset);

double compute_size_imbalance_ratio(const std::vector<int>& sizes);
double compute_size_imbalance_ratio(const GraphDataset& dataset);

// Binary class-imbalanced split. The larger class (class 0 on a tie) is the
// train majority; the train set holds round(train_fraction * N) graphs with
// minority count round(n_train / (1 + rho_class)).
SplitSpec make_class_imbalanced_split(const GraphDataset& dataset, double rho_class,
                                      double train_fraction, double val_fraction,
                                      std::uint64_t seed);

void write_split(std::ostream& out, const SplitSpec& split);
SplitSpec read_split(std::istream& in);
void write_split(const std::filesystem::path& path, const SplitSpec& split);
SplitSpec read_split(const std::filesystem::path& path);

// Planted-signal fixture: graph class is recoverable from the node-label
// histogram. Class c graphs draw each node label from a distribution that
// puts `signal` extra mass on the class's own label block.
struct PlantedConfig {
  int num_graphs = 200;
  double class1_fraction = 0.5;
  int num_node_labels = 6;
  int min_nodes = 8;
  int max_nodes = 20;
  double edge_prob = 0.25;
  double signal = 0.6;   // in [0, 1]; 0 means labels carry no class signal
};
GraphDataset make_planted_dataset(const PlantedConfig& config, std::uint64_t seed);

}  // namespace samgog
