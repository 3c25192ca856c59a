#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "sparsereg/math.hpp"

namespace sparsereg {

// Deterministic splittable RNG. Every random draw in the toolkit descends from
// one 64-bit seed through named substreams, so experiments reproduce exactly
// and parallel jobs (restarts, trials, grid points) get independent streams.
//
// Split rule: child = mix(mix(parent ^ fnv1a64(tag)) + index * GOLDEN), where
// mix is the splitmix64 finalizer. The generator itself is splitmix64.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed), seed0_(seed) {}

  static std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ull;
    }
    return h;
  }

  RngStream split(std::string_view tag, std::uint64_t index = 0) const {
    std::uint64_t s = mix(seed_of() ^ fnv1a64(tag));
    s = mix(s + index * 0x9E3779B97F4A7C15ull);
    return RngStream(s);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller; second value cached
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // uniform direction on S^{d-1}
  Vec unit_sphere(int d) {
    Vec w(d);
    double n = 0.0;
    do {
      for (double& x : w) x = normal();
      n = norm2(w);
    } while (n == 0.0);
    scale(w, 1.0 / n);
    return w;
  }

  int uniform_int(int n) {  // in [0, n)
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
  }

 private:
  // Splitting must not depend on how many draws were taken, so remember the
  // construction seed separately from the marching state.
  std::uint64_t seed_of() const { return seed0_; }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  std::uint64_t seed0_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace sparsereg
