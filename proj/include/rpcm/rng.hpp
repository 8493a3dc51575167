#pragma once

#include <cstdint>

namespace rpcm::rng {

/// splitmix64; used only to expand seeds into generator state.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

/// xoshiro256**. Streams are derived by hashing (seed, stream id), so worker
/// r can construct its generator independently and draw sequences do not
/// depend on thread scheduling. Satisfies UniformRandomBitGenerator, so the
/// standard distributions plug in directly.
class Xoshiro256StarStar {
public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }

  explicit Xoshiro256StarStar(std::uint64_t seed) : Xoshiro256StarStar(seed, 0) {}
  Xoshiro256StarStar(std::uint64_t seed, std::uint64_t stream_id) {
    SplitMix64 outer{seed};
    SplitMix64 inner{outer.next() ^ (0xD2B74407B1CE6E93ull * (stream_id + 1))};
    bool nonzero = false;
    for (auto& s : s_) {
      s = inner.next();
      nonzero |= (s != 0);
    }
    if (!nonzero) s_[0] = 1;  // the all-zero state is invalid
  }

  static Xoshiro256StarStar stream(std::uint64_t seed, std::uint64_t stream_id) {
    return {seed, stream_id};
  }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

}  // namespace rpcm::rng
