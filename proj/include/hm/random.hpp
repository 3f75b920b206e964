#pragma once

// Counter-based per-trial random streams and the sampling primitives the
// models share.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

namespace hm {

// SplitMix64 output finalizer (Steele, Lea & Flood 2014; constants from
// Stafford's "Mix13").
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Seed of trial `index` under `master_seed`. The master is scrambled first so
// that streams of nearby masters do not share offsets.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return mix64(mix64(master_seed) + kGoldenGamma * (index + 1));
}

// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  // Generator for trial `index` of a run seeded with `master_seed`.
  static constexpr SplitMix64 for_stream(std::uint64_t master_seed, std::uint64_t index) {
    return SplitMix64(stream_seed(master_seed, index));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
template <class Rng>
double uniform01(Rng& rng) {
  static_assert(Rng::min() == 0 && Rng::max() == std::numeric_limits<std::uint64_t>::max(),
                "uniform01 needs a full-range 64-bit generator");
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Index of the first cumulative bucket strictly above `u`. Ties at a bucket
// boundary go to the lowest index; zero-probability buckets are never chosen.
inline std::size_t categorical_index(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;  // rounding left u above the final sum
}

template <class Rng>
std::size_t sample_categorical(std::span<const double> probs, Rng& rng) {
  return categorical_index(probs, uniform01(rng));
}

}  // namespace hm
