#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fpm {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so draws can be taken in any order or in
/// parallel and still reproduce exactly.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t bits(std::uint64_t counter) const noexcept;
  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t counter) const noexcept;
  /// Standard normal via Box-Muller on counters 2c and 2c + 1.
  double normal(std::uint64_t counter) const noexcept;

 private:
  std::uint64_t key_;
};

/// Sequential SplitMix64 stream for permutations and random initial guesses.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;
  /// Uniform in [0, 1).
  double uniform() noexcept;
  /// Uniform integer in [0, bound), rejection-sampled; bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

/// Fisher-Yates permutation of 0..n-1 driven by SplitMix64(seed).
/// Seed 0 is reserved for the identity permutation.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

std::vector<std::size_t> invert_permutation(const std::vector<std::size_t>& perm);
bool is_permutation_of_iota(const std::vector<std::size_t>& perm);

}  // namespace fpm
