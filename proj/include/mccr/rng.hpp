#pragma once

#include <cmath>
#include <cstdint>

namespace mccr {

// SplitMix64 (Steele, Lea & Flood). Every random draw in the library goes
// through this generator so that seed -> output is a fixed, documented map
// that does not depend on the standard library's distribution internals.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1); never returns 0 or 1, so logs and
  // tangents of it stay finite.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  // Uniform integer in [0, bound) by rejection, bias-free.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via Box-Muller, one value per pair of uniforms (the sine
  // half is discarded so draws never carry hidden state).
  double next_normal() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Derives a child stream seed from a parent seed and an index. Replications,
// folds and grid cells each get disjoint streams via derive_seed(parent, i),
// so results do not depend on scheduling order or thread count.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return detail::mix64(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

}  // namespace mccr
