#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fhbench {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/**
 * Seed splitting rule. A stream seed is the base seed folded with an ordered
 * list of tags: s = mix64(s ^ mix64(tag)) for each tag in turn. Every
 * (length, purpose, group, trajectory) tuple therefore owns an independent
 * generator and results never depend on evaluation order.
 */
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = mix64(base);
  for (std::uint64_t t : tags) s = mix64(s ^ mix64(t));
  return s;
}

/// Purpose tags for derive_seed.
enum class Stream : std::uint64_t {
  GroupMeasurement = 1,
  Calibration = 2,
  Optimizer = 3,
};

constexpr std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

/**
 * mt19937_64 with distribution code written out here, so streams are
 * identical across standard libraries.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fhbench
