#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace thermocal {

// xoshiro256** seeded through splitmix64. Satisfies
// UniformRandomBitGenerator so it plugs into <random> distributions.
// Independent substreams are derived from (seed, stream index), which lets
// parallel lanes draw reproducibly regardless of scheduling.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0x5eed) noexcept;

  static Rng substream(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  double normal() noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Seed of substream `stream` under a parent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace thermocal
