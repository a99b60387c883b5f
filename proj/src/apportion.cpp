#include "samgog/apportion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "samgog/errors.hpp"

namespace samgog {

std::vector<std::int64_t> apportion(std::int64_t total, std::span<const double> weights) {
  if (total < 0) throw ConfigError("apportion: negative total");
  if (weights.empty()) {
    if (total == 0) return {};
    throw ConfigError("apportion: no slots to receive units");
  }
  double sum = 0.0;
  for (const double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ConfigError("apportion: weights must be finite and non-negative");
    sum += w;
  }
  std::vector<std::int64_t> out(weights.size(), 0);
  if (total == 0) return out;
  if (sum <= 0.0) throw ConfigError("apportion: all weights are zero");

  std::vector<double> remainder(weights.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(total) * (weights[i] / sum);
    const auto floor_q = static_cast<std::int64_t>(std::floor(quota));
    out[i] = floor_q;
    remainder[i] = quota - static_cast<double>(floor_q);
    assigned += floor_q;
  }
  // Rounding noise can push the floors one unit over the total.
  while (assigned > total) {
    auto it = std::max_element(out.begin(), out.end());
    --*it;
    remainder[static_cast<std::size_t>(it - out.begin())] += 1.0;
    --assigned;
  }

  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t r = 0; assigned < total; r = (r + 1) % order.size()) {
    ++out[order[r]];
    ++assigned;
  }
  return out;
}

std::vector<std::int64_t> split_evenly(std::int64_t total, std::size_t count) {
  if (count == 0) {
    if (total == 0) return {};
    throw ConfigError("split_evenly: no slots to receive units");
  }
  const auto n = static_cast<std::int64_t>(count);
  std::vector<std::int64_t> out(count, total / n);
  const std::int64_t rem = total % n;
  for (std::int64_t i = 0; i < rem; ++i) ++out[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace samgog
