#pragma once

#include <cstdint>
#include <cmath>

namespace jump {

// xoshiro256++ with splitmix64 seeding. Hand-rolled instead of <random> so
// that every sampled number is reproducible bit-for-bit across compilers and
// standard libraries; checkpoints and traces depend on that.
class Rng {
 public:
  explicit Rng(uint64_t seed) { reseed(seed); }
  Rng() : Rng(0) {}

  void reseed(uint64_t seed) {
    uint64_t x = seed;
    for (auto& si : s_) si = splitmix64(x);
    have_spare_ = false;
    spare_ = 0.0;
  }

  // Independent stream for (seed, a, b, c), e.g. (master, worker, episode, 0).
  static Rng stream(uint64_t seed, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t x = seed;
    uint64_t m = splitmix64(x);
    x = m ^ (a + 0x9e3779b97f4a7c15ull);
    m = splitmix64(x);
    x = m ^ (b + 0xbf58476d1ce4e5b9ull);
    m = splitmix64(x);
    x = m ^ (c + 0x94d049bb133111ebull);
    return Rng(splitmix64(x));
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // in [0, 1)
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // in [0, n)
  uint64_t uniform_index(uint64_t n) { return next_u64() % n; }

  double normal(double mean = 0.0, double std = 1.0) {
    if (have_spare_) {
      have_spare_ = false;
      return mean + std * spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return mean + std * r * std::cos(a);
  }

 private:
  static uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4] = {};
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace jump
