#pragma once

#include <cmath>
#include <cstdint>

namespace opra::stats {

/// SplitMix64. Small, fast, and fully specified here so that streams are
/// bit-identical across platforms and standard-library versions.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, n) by 128-bit multiply-shift.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Uniform double in (0, 1).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (one value per call; spare cached).
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Counter-based stream derivation: replicate i of a seeded computation uses
/// replicate_rng(seed, i), so results do not depend on how replicates are
/// distributed over workers.
inline SplitMix64 replicate_rng(std::uint64_t seed, std::uint64_t replicate) {
  SplitMix64 mix(seed ^ (0xA0761D6478BD642FULL + replicate * 0xE7037ED1A0B428DBULL));
  mix.next_u64();  // decorrelate nearby replicate indices
  return mix;
}

}  // namespace opra::stats
