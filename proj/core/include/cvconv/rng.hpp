#pragma once

#include <array>
#include <cstdint>

namespace cvconv {

// SplitMix64 step (Steele/Lea/Vigna constants). Used only to expand seeds
// into generator state and to derive independent substreams.
inline uint64_t splitmix64_next(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// xoshiro256++ (Blackman & Vigna). The library's one and only random source;
// the algorithm is pinned so that seeded results reproduce across
// implementations and platforms.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed) { *this = from_stream(seed, 0); }

  // Substream derivation: state words are the first four SplitMix64 outputs
  // of the state seed ^ (stream_index + 1) * 0x9E3779B97F4A7C15.
  static Xoshiro256pp from_stream(uint64_t seed, uint64_t stream_index) {
    uint64_t sm = seed ^ ((stream_index + 1) * 0x9E3779B97F4A7C15ull);
    Xoshiro256pp g;
    for (auto& w : g.s_) w = splitmix64_next(sm);
    if ((g.s_[0] | g.s_[1] | g.s_[2] | g.s_[3]) == 0) g.s_[0] = 1;
    return g;
  }

  uint64_t next() {
    uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 2^bits). 2^bits divides 2^64, so low-bit slicing is unbiased.
  uint32_t next_bits(int bits) {
    if (bits == 0) return 0;
    return uint32_t(next() & ((uint64_t(1) << bits) - 1));
  }

  // Uniform on [0, n) by mask-and-reject.
  uint64_t next_below(uint64_t n) {
    uint64_t mask = ~uint64_t(0);
    if (n > 1) {
      int bits = 64 - __builtin_clzll(n - 1);
      mask = (bits == 64) ? ~uint64_t(0) : (uint64_t(1) << bits) - 1;
    } else {
      return 0;
    }
    uint64_t r;
    do {
      r = next() & mask;
    } while (r >= n);
    return r;
  }

  // Uniform signed integer on [lo, hi].
  int64_t next_int(int64_t lo, int64_t hi) {
    return lo + int64_t(next_below(uint64_t(hi - lo) + 1));
  }

 private:
  Xoshiro256pp() = default;
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<uint64_t, 4> s_{};
};

}  // namespace cvconv
