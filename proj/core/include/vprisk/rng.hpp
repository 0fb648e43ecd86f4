#pragma once

#include <cstdint>

namespace vprisk {

/// Counter-based random stream.
///
/// Every draw is a pure function of (seed, stream, counter), so matrices and
/// Monte Carlo batches can be generated in any order, or in parallel, and still
/// come out bit-identical. Streams are typically indexed by matrix entry or by
/// Monte Carlo draw; counters index the variates consumed within one stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const noexcept;

  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t stream, std::uint64_t counter) const noexcept;

  /// Standard normal via Box-Muller; consumes counters 2k and 2k+1.
  double normal(std::uint64_t stream, std::uint64_t k) const noexcept;

  /// Derived generator for an independent purpose (e.g. one per replication).
  CounterRng fork(std::uint64_t tag) const noexcept;

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace vprisk
