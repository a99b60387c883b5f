#include "samgog/degree_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>

#include "samgog/apportion.hpp"
#include "samgog/errors.hpp"

namespace samgog {

void AllocConfig::validate() const {
  if (k_min < 0) throw ConfigError("alloc.k_min must be >= 0");
  if (k_max < k_min) throw ConfigError("alloc.k_max must be >= alloc.k_min");
  if (!(d_bar >= k_min && d_bar <= k_max)) throw ConfigError("alloc.d_bar must lie in [k_min, k_max]");
  if (!(rho1 >= 1.0) || !std::isfinite(rho1)) throw ConfigError("alloc.rho1 must be >= 1");
  if (!(rho2 >= 1.0) || !std::isfinite(rho2)) throw ConfigError("alloc.rho2 must be >= 1");
  if (window_r < 0) throw ConfigError("alloc.window_r must be >= 0");
}

std::int64_t target_total(std::size_t num_nodes, double d_bar) {
  return std::llround(static_cast<double>(num_nodes) * d_bar);
}

void DegreeAllocation::validate(const AllocConfig& config) const {
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] < config.k_min || k[i] > config.k_max) {
      throw IntegrityError("allocation: k[" + std::to_string(i) + "] = " + std::to_string(k[i]) + " outside [" +
                           std::to_string(config.k_min) + ", " + std::to_string(config.k_max) + "]");
    }
    sum += k[i];
  }
  if (sum != total) throw IntegrityError("allocation: degrees sum to " + std::to_string(sum) + ", expected " +
                                         std::to_string(total));
  if (total != target_total(k.size(), config.d_bar)) {
    throw IntegrityError("allocation: total " + std::to_string(total) + " differs from round(N * d_bar)");
  }
}

std::pair<std::int64_t, std::int64_t> rule1_split(std::int64_t delta, std::int64_t n_labeled,
                                                  std::int64_t n_unlabeled, double rho1) {
  if (delta < 0) throw ConfigError("rule1: negative degree budget");
  if (n_labeled < 0 || n_unlabeled < 0) throw ConfigError("rule1: negative group size");
  if (n_labeled == 0 && n_unlabeled == 0) {
    if (delta == 0) return {0, 0};
    throw ConfigError("rule1: no nodes to receive degrees");
  }
  const double weights[2] = {rho1 * static_cast<double>(n_labeled), static_cast<double>(n_unlabeled)};
  const auto shares = apportion(delta, weights);
  return {shares[0], shares[1]};
}

Rule2Result rule2_split(std::int64_t delta_L, std::span<const std::int64_t> class_counts, double rho2,
                        bool per_capita) {
  if (delta_L < 0) throw ConfigError("rule2: negative degree budget");
  Rule2Result out;
  out.class_totals.assign(class_counts.size(), 0);
  out.is_majority.assign(class_counts.size(), 0);

  std::vector<std::int64_t> present;
  for (const auto c : class_counts) {
    if (c < 0) throw ConfigError("rule2: negative class count");
    if (c > 0) present.push_back(c);
  }
  if (present.empty()) {
    if (delta_L == 0) return out;
    throw ConfigError("rule2: no labeled nodes to receive degrees");
  }
  std::sort(present.begin(), present.end());
  const std::size_t m = present.size();
  const double median = m % 2 ? static_cast<double>(present[m / 2])
                              : 0.5 * static_cast<double>(present[m / 2 - 1] + present[m / 2]);

  std::int64_t n_major = 0;
  std::int64_t n_minor = 0;
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    if (class_counts[c] > 0 && static_cast<double>(class_counts[c]) > median) out.is_majority[c] = 1;
  }
  const bool all_equal = present.front() == present.back();
  if (!all_equal && std::none_of(out.is_majority.begin(), out.is_majority.end(), [](char x) { return x != 0; })) {
    // Multi-class counts like (10, 10, 5): nothing exceeds the median.
    for (std::size_t c = 0; c < class_counts.size(); ++c) {
      if (class_counts[c] > 0 && static_cast<double>(class_counts[c]) >= median) out.is_majority[c] = 1;
    }
  }
  for (std::size_t c = 0; c < class_counts.size(); ++c) (out.is_majority[c] ? n_major : n_minor) += class_counts[c];

  if (n_major == 0 || n_minor == 0) {
    // A single group: tie or one labeled class.
    (n_major > 0 ? out.major_total : out.minor_total) = delta_L;
  } else {
    const double ratio = all_equal ? 1.0 : rho2;
    const double weights[2] = {per_capita ? ratio * static_cast<double>(n_major) : ratio,
                               per_capita ? static_cast<double>(n_minor) : 1.0};
    const auto shares = apportion(delta_L, weights);
    out.major_total = shares[0];
    out.minor_total = shares[1];
  }

  // Even per-node split inside each group, expressed per class in class order.
  for (const bool major : {true, false}) {
    const std::int64_t group_nodes = major ? n_major : n_minor;
    if (group_nodes == 0) continue;
    const auto per_node = split_evenly(major ? out.major_total : out.minor_total, static_cast<std::size_t>(group_nodes));
    std::size_t cursor = 0;
    for (std::size_t c = 0; c < class_counts.size(); ++c) {
      if (static_cast<bool>(out.is_majority[c]) != major) continue;
      for (std::int64_t j = 0; j < class_counts[c]; ++j) out.class_totals[c] += per_node[cursor++];
    }
  }
  return out;
}

std::vector<double> rule3_weights(std::span<const int> unlabeled_sizes, std::span<const int> train_sizes, int r) {
  if (r < 0) throw ConfigError("rule3: window radius must be >= 0");
  std::vector<int> sorted(train_sizes.begin(), train_sizes.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> w;
  w.reserve(unlabeled_sizes.size());
  bool any = false;
  for (const int s : unlabeled_sizes) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), s - r);
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), s + r);
    w.push_back(static_cast<double>(hi - lo));
    any = any || hi != lo;
  }
  if (!any) std::fill(w.begin(), w.end(), 1.0);
  return w;
}

DegreeAllocation allocate_degrees(const SplitSpec& split, const GraphDataset& dataset, const AllocConfig& config) {
  config.validate();
  const std::size_t n = dataset.size();
  if (n < 2) throw ConfigError("allocate_degrees needs at least 2 nodes");
  split.validate(dataset);

  DegreeAllocation out;
  out.total = target_total(n, config.d_bar);
  if (out.total < static_cast<std::int64_t>(n) * config.k_min ||
      out.total > static_cast<std::int64_t>(n) * config.k_max) {
    throw FeasibilityError("infeasible allocation: round(N * d_bar) = " + std::to_string(out.total) +
                           " outside [N * k_min, N * k_max]");
  }
  const std::int64_t delta = out.total - static_cast<std::int64_t>(n) * config.k_min;

  std::vector<char> is_labeled(n, 0);
  for (const int i : split.train_idx) is_labeled[static_cast<std::size_t>(i)] = 1;
  std::vector<int> labeled;
  std::vector<int> unlabeled;
  for (std::size_t i = 0; i < n; ++i) (is_labeled[i] ? labeled : unlabeled).push_back(static_cast<int>(i));

  const auto [delta_L, delta_U] = rule1_split(delta, static_cast<std::int64_t>(labeled.size()),
                                              static_cast<std::int64_t>(unlabeled.size()), config.rho1);

  std::vector<std::int64_t> extra(n, 0);
  std::vector<double> share(n, 0.0);

  if (!labeled.empty()) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(std::max(dataset.num_classes, 1)), 0);
    for (const int i : labeled) ++counts[static_cast<std::size_t>(*dataset.graphs[static_cast<std::size_t>(i)].label)];
    const auto r2 = rule2_split(delta_L, counts, config.rho2, config.rule2_per_capita);
    for (const bool major : {true, false}) {
      std::vector<int> members;
      for (const int i : labeled) {
        if (static_cast<bool>(r2.is_majority[static_cast<std::size_t>(*dataset.graphs[static_cast<std::size_t>(i)].label)]) == major)
          members.push_back(i);
      }
      if (members.empty()) continue;
      const std::int64_t group_total = major ? r2.major_total : r2.minor_total;
      const auto per_node = split_evenly(group_total, members.size());
      for (std::size_t j = 0; j < members.size(); ++j) {
        extra[static_cast<std::size_t>(members[j])] = per_node[j];
        share[static_cast<std::size_t>(members[j])] = static_cast<double>(group_total) / static_cast<double>(members.size());
      }
    }
  }

  if (!unlabeled.empty()) {
    std::vector<int> unlabeled_sizes;
    std::vector<int> train_sizes;
    for (const int i : unlabeled) unlabeled_sizes.push_back(dataset.graphs[static_cast<std::size_t>(i)].num_nodes);
    for (const int i : labeled) train_sizes.push_back(dataset.graphs[static_cast<std::size_t>(i)].num_nodes);
    const auto weights = rule3_weights(unlabeled_sizes, train_sizes, config.window_r);
    const auto parts = apportion(delta_U, weights);
    const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (std::size_t j = 0; j < unlabeled.size(); ++j) {
      extra[static_cast<std::size_t>(unlabeled[j])] = parts[j];
      share[static_cast<std::size_t>(unlabeled[j])] = static_cast<double>(delta_U) * weights[j] / weight_sum;
    }
  }

  out.k.resize(n);
  std::int64_t excess = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.k[i] = config.k_min + extra[i];
    if (out.k[i] > config.k_max) {
      excess += out.k[i] - config.k_max;
      out.k[i] = config.k_max;
    }
  }
  if (excess > 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return share[a] > share[b]; });
    for (const auto i : order) {
      if (excess == 0) break;
      const std::int64_t room = config.k_max - out.k[i];
      const std::int64_t give = std::min(room, excess);
      out.k[i] += give;
      excess -= give;
    }
  }
  out.validate(config);
  return out;
}

double allocation_objective(std::span<const double> prob, const DegreeAllocation& allocation) {
  if (prob.size() != allocation.k.size()) throw ShapeError("allocation_objective: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) sum += static_cast<double>(allocation.k[i]) * prob[i];
  return sum;
}

DegreeAllocation greedy_allocation(std::span<const double> prob, const AllocConfig& config) {
  config.validate();
  const std::size_t n = prob.size();
  DegreeAllocation out;
  out.total = target_total(n, config.d_bar);
  if (out.total < static_cast<std::int64_t>(n) * config.k_min ||
      out.total > static_cast<std::int64_t>(n) * config.k_max) {
    throw FeasibilityError("infeasible allocation constraints");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return prob[a] > prob[b]; });
  out.k.assign(n, config.k_min);
  std::int64_t remaining = out.total - static_cast<std::int64_t>(n) * config.k_min;
  for (const auto i : order) {
    const std::int64_t give = std::min<std::int64_t>(remaining, config.k_max - config.k_min);
    out.k[i] += give;
    remaining -= give;
  }
  return out;
}

OracleAllocation oracle_optimal_allocation(std::span<const double> prob, const AllocConfig& config) {
  config.validate();
  const std::size_t n = prob.size();
  if (n == 0 || n > 12) throw ConfigError("oracle allocation supports 1..12 nodes");
  for (const double p : prob) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("oracle allocation: prob entries must lie in [0, 1]");
  }
  OracleAllocation out;
  out.greedy = greedy_allocation(prob, config);
  out.greedy_objective = allocation_objective(prob, out.greedy);

  const std::int64_t total = out.greedy.total;
  const std::int64_t lo = config.k_min;
  const std::int64_t hi = config.k_max;
  std::vector<std::int64_t> current(n, 0);
  bool found = false;
  std::function<void(std::size_t, std::int64_t, double)> visit = [&](std::size_t i, std::int64_t remaining,
                                                                      double objective) {
    if (i == n) {
      if (remaining != 0) return;
      ++out.feasible_count;
      if (!found || objective > out.best_objective) {
        found = true;
        out.best_objective = objective;
        out.best.k = current;
      }
      return;
    }
    const auto rest = static_cast<std::int64_t>(n - i - 1);
    const std::int64_t from = std::max(lo, remaining - rest * hi);
    const std::int64_t to = std::min(hi, remaining - rest * lo);
    for (std::int64_t k = from; k <= to; ++k) {
      current[i] = k;
      visit(i + 1, remaining - k, objective + static_cast<double>(k) * prob[i]);
    }
  };
  visit(0, total, 0.0);
  if (!found) throw FeasibilityError("oracle allocation: no feasible degree vector");
  out.best.total = total;
  return out;
}

void write_allocation(std::ostream& out, const DegreeAllocation& allocation) {
  for (std::size_t i = 0; i < allocation.k.size(); ++i) out << i << ' ' << allocation.k[i] << '\n';
  out << "total " << allocation.total << '\n';
}

}  // namespace samgog
