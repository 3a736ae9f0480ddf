#pragma once

#include <cstdint>
#include <utility>

namespace sphfield::rng {

// Seed expander. One step of the splitmix64 sequence: advances `state` by
// 0x9E3779B97F4A7C15 and returns the mixed output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256** generator. The 256-bit state is filled from the seed with
// four splitmix64 steps, so every language binding that follows this recipe
// reproduces identical streams.
//
//   uniform01: top 53 bits of next(), scaled by 2^-53, giving [0, 1).
//   normal_pair: Box-Muller on (1 - u1, u2):
//       r = sqrt(-2 ln(1 - u1)),  a = 2 pi u2  ->  (r cos a, r sin a).
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) {
    for (auto& word : state_) word = splitmix64(seed);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  std::pair<double, double> normal_pair();

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace sphfield::rng
