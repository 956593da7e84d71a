#pragma once

#include <cstdint>

namespace dast {

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// Counter-based SplitMix64 stream.
//
// Draw i of a stream with key k is splitmix64_mix(k + (i + 1) * golden), so
// any draw can be recomputed from (key, index) alone. Child streams take the
// key splitmix64_mix(k ^ splitmix64_mix(child_index + golden)), which lets
// every question own an independent stream derived from (seed, index).
//
// uniform() maps the top 53 bits to [0, 1); normal() is Box-Muller using the
// cosine branch only, consuming exactly two uniforms per call.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t position() const { return counter_; }

  constexpr std::uint64_t next_u64() {
    ++counter_;
    return splitmix64_mix(key_ + counter_ * kGoldenGamma);
  }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe to take the log of.
  double uniform_open0() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  double normal();

  constexpr CounterRng child(std::uint64_t index) const {
    return CounterRng(splitmix64_mix(key_ ^ splitmix64_mix(index + kGoldenGamma)));
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace dast
