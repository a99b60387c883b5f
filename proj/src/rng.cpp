#include "samgog/rng.hpp"

#include <cmath>
#include <numbers>

namespace samgog {

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc909ULL);
  for (const auto c : path) {
    h = mix64(h + 0x9e3779b97f4a7c15ULL + mix64(c ^ 0xbb67ae8584caa73bULL));
  }
  return h;
}

std::uint64_t CounterRng::below(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection for an unbiased result.
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const std::uint64_t x = (*this)();
    const auto m = static_cast<unsigned __int128>(x) * n;
    if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
  }
}

double CounterRng::normal() noexcept {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace samgog
