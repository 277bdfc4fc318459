#pragma once

#include <cstdint>

namespace crnd {

// Counter-based generator: output i of a stream is mix64(key + i*GAMMA).
// Streams are derived from (master seed, stream index, role), so concurrent
// sessions can draw independently without sharing state.
class Rng {
public:
  explicit Rng(uint64_t key) : key_(key) {}

  static uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static Rng derive(uint64_t master, uint64_t stream, uint64_t role = 0) {
    uint64_t k = mix64(master);
    k = mix64(k ^ (0xa5a5a5a5a5a5a5a5ull + stream));
    k = mix64(k ^ (0x5c5c5c5c5c5c5c5cull + role));
    return Rng(k);
  }

  uint64_t next_u64() { return mix64(key_ + counter_++ * 0x9e3779b97f4a7c15ull); }

  // Unbiased integer in [0, bound) by rejection.
  uint64_t below(uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  uint32_t bit() { return static_cast<uint32_t>(next_u64() >> 63); }

  // Uniform double in [0, 1) with 53 bits.
  double real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace crnd
