#include "stackelberg/rng.hpp"

#include <cmath>
#include <numbers>

namespace stackelberg {

namespace {

std::uint64_t Rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t mix = seed;
  std::uint64_t state = SplitMix64(mix) ^ Rotl(stream * 0xd1b54a32d192ed03ULL + 1, 17);
  for (auto& word : s_) word = SplitMix64(state);
}

Rng Rng::FromState(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3) {
  Rng rng;
  rng.s_[0] = s0;
  rng.s_[1] = s1;
  rng.s_[2] = s2;
  rng.s_[3] = s3;
  return rng;
}

std::uint64_t Rng::NextU64() {
  const std::uint64_t result = Rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = Rotl(s_[3], 45);
  return result;
}

double Rng::Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

double Rng::Uniform(double lo, double hi) {
  if (!(lo <= hi)) throw Error(ErrorKind::kInvalidArgument, "uniform range needs lo <= hi");
  if (lo == hi) return lo;
  return lo + (hi - lo) * Uniform();
}

double Rng::Normal() {
  // 1 - U lies in (0, 1], keeping the logarithm finite.
  const double u1 = 1.0 - Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec Rng::UnitDirection(int dim) {
  if (dim < 1) throw Error(ErrorKind::kInvalidArgument, "direction needs a positive dimension");
  Vec v(dim);
  double norm = 0.0;
  while (norm == 0.0) {
    for (int i = 0; i < dim; ++i) v[i] = Normal();
    norm = v.norm();
  }
  return v / norm;
}

}  // namespace stackelberg
