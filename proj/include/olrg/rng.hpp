#pragma once

#include <cstdint>

namespace olrg {

/// Deterministic, platform-independent generator (xoshiro256** seeded by
/// splitmix64). All stochastic choices in the library go through this class so
/// runs are reproducible from a single integer seed on any machine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                      // [0, 1)
  double normal();                       // standard Gaussian, Box-Muller
  std::uint64_t below(std::uint64_t n);  // uniform in [0, n)
  int sign();                            // uniform in {-1, +1}

  /// Derives a decorrelated child seed for a named stream.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t s_[4];
};

}  // namespace olrg
