#pragma once

#include <cstdint>

#include "stackelberg/error.hpp"

namespace stackelberg {

// xoshiro256** (Blackman and Vigna) with state seeded by splitmix64.
//
// Streams are derived from (seed, stream) by feeding both through splitmix64,
// so each (seed, stream) pair yields an independent, reproducible sequence.
// The algorithm and every derived distribution below are frozen: changing
// any of them changes experiment outputs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);
  // Raw generator state, for known-answer tests.
  static Rng FromState(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3);

  std::uint64_t NextU64();

  // Uniform on [0, 1) with 53 random bits: (NextU64() >> 11) * 2^-53.
  double Uniform();
  // lo + (hi - lo) * Uniform(); returns lo exactly when lo == hi.
  double Uniform(double lo, double hi);
  // Standard normal by the Box-Muller cosine branch, one variate per call
  // (two uniforms consumed).
  double Normal();
  // Uniformly distributed unit vector (normalized Gaussian vector).
  Vec UnitDirection(int dim);

 private:
  Rng() = default;

  std::uint64_t s_[4];
};

std::uint64_t SplitMix64(std::uint64_t& state);

}  // namespace stackelberg
