/*! @file rng.hpp
 *  @brief Seeded random source with platform-independent sample streams.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ringfill {

//! Deterministic random source.
//!
//! All sampling is built directly on the mt19937_64 engine (whose output is
//! pinned by the standard) instead of the std distributions, whose results
//! differ between standard libraries. Identical seeds therefore give
//! identical streams everywhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  //! Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  //! Unbiased uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
    const std::uint64_t reject = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= reject) return r % bound;
    }
  }

  //! Gaussian sample via Box-Muller; consumes two engine draws.
  double normal(double mean, double stddev) {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log1p(-u1));  // log(1-u1), u1 < 1
    return mean + stddev * radius * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 engine_;
};

//! Mixes words into a well-spread 64-bit value (splitmix64 finalizer).
//! Used to derive independent per-run seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                              std::uint64_t d = 0) {
  auto finalize = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  std::uint64_t h = finalize(a);
  h = finalize(h ^ finalize(b + 0x2545f4914f6cdd1dull));
  h = finalize(h ^ finalize(c + 0x6a09e667f3bcc909ull));
  h = finalize(h ^ finalize(d + 0xbb67ae8584caa73bull));
  return h;
}

}  // namespace ringfill
