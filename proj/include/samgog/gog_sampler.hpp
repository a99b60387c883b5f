#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "samgog/degree_alloc.hpp"
#include "samgog/similarity.hpp"

namespace samgog {

enum class SampleMode { with_replacement, without_replacement };

std::string to_string(SampleMode mode);
SampleMode sample_mode_from_string(const std::string& name);

struct GoGEdge {
  int src = 0;
  int dst = 0;
  std::int64_t multiplicity = 1;

  friend bool operator==(const GoGEdge&, const GoGEdge&) = default;
};

// Directed sampled graph over dataset instances. Edges sorted by (src, dst).
struct GoGGraph {
  int num_nodes = 0;
  SampleMode mode = SampleMode::without_replacement;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::vector<GoGEdge> edges;
  // Nodes whose k_i exceeded their support in without-replacement mode.
  std::vector<int> clamped_nodes;

  std::int64_t total_multiplicity() const noexcept;
  std::vector<std::int64_t> out_degrees() const;
};

struct SamplerConfig {
  SampleMode mode = SampleMode::without_replacement;
  std::uint64_t seed = 0;
  int samples_per_epoch = 1;
  int num_threads = 1;

  void validate() const;
};

// Stream id for the sample-th GoG of an epoch; node streams are derived from
// (seed, stream_id, node).
std::uint64_t gog_stream_id(std::uint64_t epoch, std::uint64_t sample) noexcept;

// Draws k_i neighbours for every node i from the categorical distribution
// S[i, .] / sum_m S[i, m] (self excluded). With replacement, repeated draws
// become multiplicity; without replacement, the k_i largest perturbed keys
// log(u) / w are taken. Throws DegenerateError naming the node when a row has
// no positive off-diagonal entry.
GoGGraph sample_gog(const SimilarityMatrix& sim, const DegreeAllocation& allocation, const SamplerConfig& config,
                    std::uint64_t stream_id);

// Fraction of edge multiplicity joining same-label endpoints.
double edge_homophily(const GoGGraph& gog, std::span<const int> true_labels);

// Mean edge-count matrix over num_trials with-replacement samples
// (stream ids 0..num_trials-1).
Matrix empirical_inclusion_matrix(const SimilarityMatrix& sim, const DegreeAllocation& allocation,
                                  const SamplerConfig& config, int num_trials);

// Closed-form expected counts k_i S[i, j] / sum_m S[i, m] (self excluded).
Matrix expected_inclusion_matrix(const SimilarityMatrix& sim, const DegreeAllocation& allocation);

// Header "N mode seed", then one "src dst multiplicity" line per edge.
void write_gog(std::ostream& out, const GoGGraph& gog);
GoGGraph read_gog(std::istream& in);

}  // namespace samgog
