#pragma once

#include <cstdint>
#include <random>

namespace precip {

// Seeded pseudo-random source. One instance per thread; never shared.
// Identical seeds produce identical streams on every platform because all
// variates are derived from the raw 64-bit Mersenne Twister output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x5eedULL) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential();
  double normal();

  // Independent stream for shard `shard` of a computation seeded with `seed`.
  static Rng for_shard(std::uint64_t seed, std::uint64_t shard);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace precip
