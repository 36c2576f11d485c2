#pragma once

#include <cstdint>
#include <span>

namespace rpavg {

// Stream splitting for reproducible per-index randomness.
//
// Every random quantity attached to a multi-index k (the perturbation
// delta_k, the smoothing scale epsilon_k) is drawn from its own stream whose
// state is seed XOR hash(tag, k). Results therefore do not depend on the order
// in which indices are visited, which keeps parallel replicas bit-identical.

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

enum class StreamTag : std::uint64_t {
  kDelta = 0xD17A,
  kEpsilon = 0xE951,
  kExpectation = 0xE4EC,
  kSamplePoints = 0x5A3B,
};

std::uint64_t index_hash(StreamTag tag, std::span<const long long> k) noexcept;

class Stream {
 public:
  explicit Stream(std::uint64_t state) noexcept : state_(state) {}
  Stream(std::uint64_t seed, StreamTag tag, std::span<const long long> k) noexcept
      : state_(seed ^ index_hash(tag, k)) {}

  std::uint64_t next_u64() noexcept { return splitmix64(state_); }
  // Uniform in [0, 1) with 53 random bits.
  double next_uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace rpavg
