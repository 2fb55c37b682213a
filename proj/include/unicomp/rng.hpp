#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace unicomp {

/// SplitMix64 finalizer; used to derive well-separated seeds.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Derives a child seed from a parent seed and a path of stream ids, e.g.
/// derive_seed(seed, {cell, trial}). Pure function of its inputs.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path) noexcept;

/// Seedable, splittable generator. Uniform and normal draws are implemented
/// here rather than through <random> distributions so that sampled patterns
/// are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Marsaglia polar method).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent generator for a sub-stream. Depends only on the seed this
  /// generator was created with, not on how many values were drawn.
  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline constexpr std::uint64_t kDefaultSeed = 20090917;

}  // namespace unicomp
