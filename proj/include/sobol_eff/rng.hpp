#pragma once

#include <array>
#include <cstdint>

namespace sobol_eff {

/// Identifies one independent random stream: (master seed, replication).
struct ReplicationSeed {
  std::uint64_t master_seed = 0;
  std::uint32_t replication_index = 0;
};

/// Philox4x32-10 counter-based generator.
///
/// Every draw is a pure function of (seed, row, stream), so rows and
/// replications can be generated in any order or in parallel with identical
/// results.
class CounterRng {
 public:
  explicit CounterRng(ReplicationSeed seed) : seed_(seed) {}

  std::array<std::uint32_t, 4> block(std::uint64_t row, std::uint32_t stream) const;

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform(std::uint64_t row, std::uint32_t stream) const;

  /// Standard normal by inverse CDF of `uniform(row, stream)`.
  double normal(std::uint64_t row, std::uint32_t stream) const;

  ReplicationSeed seed() const { return seed_; }

 private:
  ReplicationSeed seed_;
};

/// SplitMix64 finalizer; used to derive sub-seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace sobol_eff
