#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "samgog/graph_data.hpp"

namespace samgog {

struct AllocConfig {
  double d_bar = 5.0;
  int k_min = 3;
  int k_max = 100;
  double rho1 = 5.0;
  double rho2 = 3.0;
  int window_r = 20;
  // Rule 2 ratio on group totals (default) or on per-node shares.
  bool rule2_per_capita = false;

  void validate() const;
};

struct DegreeAllocation {
  std::vector<std::int64_t> k;
  std::int64_t total = 0;

  // Bounds and exact-sum invariants; throws IntegrityError.
  void validate(const AllocConfig& config) const;
};

// round(N * d_bar), the exact degree sum every allocation must hit.
std::int64_t target_total(std::size_t num_nodes, double d_bar);

// Splits delta so that (delta_L / N_L) / (delta_U / N_U) = rho1 before
// rounding. An empty side receives nothing.
std::pair<std::int64_t, std::int64_t> rule1_split(std::int64_t delta, std::int64_t n_labeled,
                                                  std::int64_t n_unlabeled, double rho1);

struct Rule2Result {
  std::vector<std::int64_t> class_totals;   // extra degrees per class
  std::vector<char> is_majority;            // per class
  std::int64_t major_total = 0;
  std::int64_t minor_total = 0;
};

// Splits delta_L between the majority group (classes whose labeled count is
// above the median) and the minority group so that their totals are in ratio
// rho2 (or per-node shares, when per_capita). Equal binary counts force
// rho2 = 1. Within a group every labeled node gets the same share; remainders
// go to the lowest classes first.
Rule2Result rule2_split(std::int64_t delta_L, std::span<const std::int64_t> class_counts, double rho2,
                        bool per_capita = false);

// weight_i = #{s in train_sizes : |s - unlabeled_sizes[i]| <= r}; all-zero
// weights fall back to uniform.
std::vector<double> rule3_weights(std::span<const int> unlabeled_sizes, std::span<const int> train_sizes, int r);

// Rules 1-3 on top of a k_min floor, then clamp-and-redistribute for k_max.
DegreeAllocation allocate_degrees(const SplitSpec& split, const GraphDataset& dataset, const AllocConfig& config);

// Exhaustive maximiser of sum_i k_i prob_i under the allocation constraints
// (N <= 12), alongside the greedy fill-in-prob-order solution.
struct OracleAllocation {
  DegreeAllocation best;
  double best_objective = 0.0;
  DegreeAllocation greedy;
  double greedy_objective = 0.0;
  std::uint64_t feasible_count = 0;
};
OracleAllocation oracle_optimal_allocation(std::span<const double> prob, const AllocConfig& config);

// Sort by prob descending (stable), start everyone at k_min, fill to k_max in
// that order until the total is reached.
DegreeAllocation greedy_allocation(std::span<const double> prob, const AllocConfig& config);

double allocation_objective(std::span<const double> prob, const DegreeAllocation& allocation);

// "node_id k_i" per line, then "total <sum>".
void write_allocation(std::ostream& out, const DegreeAllocation& allocation);

}  // namespace samgog
