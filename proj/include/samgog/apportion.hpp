#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace samgog {

// Largest-remainder (Hamilton) apportionment of `total` integer units in
// proportion to non-negative `weights`. Each entry gets floor(quota) and the
// leftover units go to the largest fractional remainders, ties broken by
// ascending index. The result always sums to `total` exactly.
// Throws ConfigError if total < 0, weights are empty or contain a negative or
// non-finite value, or all weights are zero while total > 0.
std::vector<std::int64_t> apportion(std::int64_t total, std::span<const double> weights);

// Equal split of `total` over `count` slots; the remainder goes one unit each
// to the lowest slots.
std::vector<std::int64_t> split_evenly(std::int64_t total, std::size_t count);

}  // namespace samgog
