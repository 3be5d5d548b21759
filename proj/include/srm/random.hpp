#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace srm {

// Keyed counter-style stream family: a 64-bit key is scrambled through
// splitmix64 to seed a xoshiro256++ state.  Streams with distinct keys are
// statistically independent for our purposes, and the whole scheme is
// platform-stable (no std::*_distribution involved anywhere).
class RandomStream {
 public:
  static constexpr const char* kAlgorithm = "xoshiro256++ seeded via splitmix64";

  explicit RandomStream(std::uint64_t key) : key_(key) {
    std::uint64_t s = scramble(key);
    for (auto& word : state_) {
      s += 0x9E3779B97F4A7C15ULL;
      word = scramble(s);
    }
  }

  // Stream for one replicate of a run keyed by a master seed.
  static RandomStream seed_stream(std::uint64_t master_seed, std::uint64_t replicate) {
    return RandomStream(scramble(master_seed + 0x9E3779B97F4A7C15ULL * (replicate + 1)));
  }

  // Child stream addressed by a tag; children of distinct tags never share state.
  RandomStream fork(std::uint64_t tag) const {
    return RandomStream(scramble(key_ ^ scramble(tag + 0xA3EC647659359ACDULL)));
  }

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() {
    std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1); safe under log() and pow(u, negative).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  double next_exponential() { return -std::log(next_unit()); }

  int next_sign() { return (next_u64() >> 63) ? 1 : -1; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static constexpr std::uint64_t scramble(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t key_;
};

}  // namespace srm
