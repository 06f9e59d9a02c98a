#pragma once

// Portable seeded randomness. The standard <random> distributions are
// implementation-defined, so generated clouds and cable cuts would differ
// between standard libraries; everything here is defined bit-for-bit.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace qperc {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Sub-seed for stream `tag` (e.g. "edge", "replicate") and index `i` under a
/// master seed. Distinct (tag, i) pairs give independent streams, and a
/// stream does not depend on how many other streams were drawn before it.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t i) {
  return splitmix64(splitmix64(master ^ fnv1a64(tag)) + splitmix64(i + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    const double x = lo + (hi - lo) * uniform();
    return x < hi ? x : std::nextafter(hi, lo);
  }

  /// Unbiased-enough index in [0, n) by multiply-shift.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  /// Exponential variate with the given mean.
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qperc
