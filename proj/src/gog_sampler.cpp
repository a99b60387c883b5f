#include "samgog/gog_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "samgog/errors.hpp"
#include "samgog/rng.hpp"

namespace samgog {

std::string to_string(SampleMode mode) {
  return mode == SampleMode::with_replacement ? "with-replacement" : "without-replacement";
}

SampleMode sample_mode_from_string(const std::string& name) {
  if (name == "with-replacement") return SampleMode::with_replacement;
  if (name == "without-replacement") return SampleMode::without_replacement;
  throw ConfigError("unknown sampling mode '" + name + "'");
}

std::int64_t GoGGraph::total_multiplicity() const noexcept {
  std::int64_t total = 0;
  for (const auto& e : edges) total += e.multiplicity;
  return total;
}

std::vector<std::int64_t> GoGGraph::out_degrees() const {
  std::vector<std::int64_t> deg(static_cast<std::size_t>(num_nodes), 0);
  for (const auto& e : edges) deg[static_cast<std::size_t>(e.src)] += e.multiplicity;
  return deg;
}

void SamplerConfig::validate() const {
  if (samples_per_epoch < 1) throw ConfigError("sampler.samples_per_epoch must be >= 1");
  if (num_threads < 1) throw ConfigError("sampler.num_threads must be >= 1");
}

std::uint64_t gog_stream_id(std::uint64_t epoch, std::uint64_t sample) noexcept {
  return derive_seed(epoch, {sample});
}

namespace {

struct RowSample {
  std::vector<GoGEdge> edges;
  bool clamped = false;
};

RowSample sample_row(const SimilarityMatrix& sim, int node, std::int64_t k, SampleMode mode, std::uint64_t key) {
  const auto n = sim.S.cols();
  RowSample out;
  if (k == 0) return out;

  std::vector<int> support;
  std::vector<double> weights;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double w = sim.S(node, j);
    if (j == node || !(w > 0.0)) continue;
    support.push_back(static_cast<int>(j));
    weights.push_back(w);
  }
  if (support.empty()) {
    throw DegenerateError("sample_gog: node " + std::to_string(node) +
                          " has no positive off-diagonal similarity to sample from");
  }

  CounterRng rng(key);
  if (mode == SampleMode::with_replacement) {
    std::vector<double> cdf(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cdf.begin());
    const double total = cdf.back();
    std::vector<std::int64_t> counts(support.size(), 0);
    for (std::int64_t draw = 0; draw < k; ++draw) {
      const double u = rng.uniform() * total;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      ++counts[static_cast<std::size_t>(it - cdf.begin())];
    }
    for (std::size_t s = 0; s < support.size(); ++s) {
      if (counts[s] > 0) out.edges.push_back({node, support[s], counts[s]});
    }
    return out;
  }

  auto take = static_cast<std::size_t>(k);
  if (take > support.size()) {
    take = support.size();
    out.clamped = true;
  }
  std::vector<std::pair<double, int>> keyed(support.size());
  for (std::size_t s = 0; s < support.size(); ++s) keyed[s] = {std::log(rng.uniform_open()) / weights[s], support[s]};
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(take), keyed.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  std::vector<int> chosen;
  chosen.reserve(take);
  for (std::size_t s = 0; s < take; ++s) chosen.push_back(keyed[s].second);
  std::sort(chosen.begin(), chosen.end());
  for (const int dst : chosen) out.edges.push_back({node, dst, 1});
  return out;
}

}  // namespace

GoGGraph sample_gog(const SimilarityMatrix& sim, const DegreeAllocation& allocation, const SamplerConfig& config,
                    std::uint64_t stream_id) {
  config.validate();
  const auto n = static_cast<int>(sim.S.rows());
  if (sim.S.cols() != n) throw ShapeError("sample_gog: similarity matrix is not square");
  if (static_cast<int>(allocation.k.size()) != n) throw ShapeError("sample_gog: allocation length differs from S");

  std::vector<RowSample> rows(static_cast<std::size_t>(n));
  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      rows[static_cast<std::size_t>(i)] = sample_row(sim, i, allocation.k[static_cast<std::size_t>(i)], config.mode,
                                                     derive_seed(config.seed, {stream_id, static_cast<std::uint64_t>(i)}));
    }
  };
  const int threads = std::min(config.num_threads, std::max(n, 1));
  if (threads <= 1) {
    work(0, n);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::jthread> pool;
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          work(t * chunk, std::min(n, (t + 1) * chunk));
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  GoGGraph gog;
  gog.num_nodes = n;
  gog.mode = config.mode;
  gog.seed = config.seed;
  gog.stream_id = stream_id;
  for (int i = 0; i < n; ++i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    gog.edges.insert(gog.edges.end(), row.edges.begin(), row.edges.end());
    if (row.clamped) gog.clamped_nodes.push_back(i);
  }
  if (!gog.clamped_nodes.empty()) {
    std::clog << "warning: sample_gog: " << gog.clamped_nodes.size()
              << " node(s) requested more distinct neighbours than their support; degree reduced (first: node "
              << gog.clamped_nodes.front() << ")\n";
  }
  return gog;
}

double edge_homophily(const GoGGraph& gog, std::span<const int> true_labels) {
  if (static_cast<int>(true_labels.size()) != gog.num_nodes) throw ShapeError("edge_homophily: label count mismatch");
  std::int64_t same = 0;
  std::int64_t total = 0;
  for (const auto& e : gog.edges) {
    total += e.multiplicity;
    if (true_labels[static_cast<std::size_t>(e.src)] == true_labels[static_cast<std::size_t>(e.dst)]) same += e.multiplicity;
  }
  if (total == 0) throw DegenerateError("edge_homophily: GoG has no edges");
  return static_cast<double>(same) / static_cast<double>(total);
}

Matrix expected_inclusion_matrix(const SimilarityMatrix& sim, const DegreeAllocation& allocation) {
  const auto n = sim.S.rows();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && sim.S(i, j) > 0.0) total += sim.S(i, j);
    }
    if (!(total > 0.0)) throw DegenerateError("expected_inclusion_matrix: node " + std::to_string(i) + " has an empty row");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && sim.S(i, j) > 0.0)
        out(i, j) = static_cast<double>(allocation.k[static_cast<std::size_t>(i)]) * sim.S(i, j) / total;
    }
  }
  return out;
}

Matrix empirical_inclusion_matrix(const SimilarityMatrix& sim, const DegreeAllocation& allocation,
                                  const SamplerConfig& config, int num_trials) {
  if (config.mode != SampleMode::with_replacement)
    throw ConfigError("empirical_inclusion_matrix requires with-replacement sampling");
  if (num_trials < 1) throw ConfigError("empirical_inclusion_matrix needs at least one trial");
  const auto n = sim.S.rows();
  Matrix sum = Matrix::Zero(n, n);
  for (int t = 0; t < num_trials; ++t) {
    const auto gog = sample_gog(sim, allocation, config, static_cast<std::uint64_t>(t));
    for (const auto& e : gog.edges) sum(e.src, e.dst) += static_cast<double>(e.multiplicity);
  }
  return sum / static_cast<double>(num_trials);
}

void write_gog(std::ostream& out, const GoGGraph& gog) {
  out << gog.num_nodes << ' ' << to_string(gog.mode) << ' ' << gog.seed << '\n';
  for (const auto& e : gog.edges) out << e.src << ' ' << e.dst << ' ' << e.multiplicity << '\n';
}

GoGGraph read_gog(std::istream& in) {
  GoGGraph gog;
  std::string mode;
  if (!(in >> gog.num_nodes >> mode >> gog.seed)) throw ParseError("GoG dump: bad header");
  gog.mode = sample_mode_from_string(mode);
  GoGEdge e;
  while (in >> e.src >> e.dst >> e.multiplicity) {
    if (e.src < 0 || e.dst < 0 || e.src >= gog.num_nodes || e.dst >= gog.num_nodes || e.multiplicity < 1)
      throw IntegrityError("GoG dump: bad edge");
    gog.edges.push_back(e);
  }
  if (!in.eof()) throw ParseError("GoG dump: trailing garbage");
  return gog;
}

}  // namespace samgog
