#include "precip/rng.hpp"

#include <cmath>
#include <numbers>

namespace precip {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::normal() {
  // Box-Muller, one variate per call so the stream position is predictable.
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  return radius * std::cos(2.0 * std::numbers::pi * uniform());
}

Rng Rng::for_shard(std::uint64_t seed, std::uint64_t shard) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(shard + 0x632be59bd9b4e019ULL)));
}

}  // namespace precip
