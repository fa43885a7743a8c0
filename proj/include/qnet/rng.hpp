#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qnet {

/// Stream tags for keyed random draws. Values are part of the reproducibility
/// contract: changing one changes every downstream statistic.
enum class Stream : std::uint64_t {
  Placement = 0x101,
  EdgeDraw = 0x102,
  EdgeWidth = 0x103,
  Capacity = 0x104,
  Pairs = 0x201,
  LinkDraw = 0x202,
  SwapDraw = 0x203,
  HopCalibration = 0x301,
  Experiment = 0x401,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Hashes a seed and an ordered tuple of keys into one 64-bit value.
inline std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

/// Maps 64 random bits to [0, 1) with 53 bits of precision.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-style draw: a uniform in [0, 1) that is a pure function of its key.
inline double keyed_uniform(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  return to_unit(splitmix64(derive_key(seed, keys)));
}

/// Sequential generator for one substream. Distribution code is written here
/// rather than using <random> distributions so streams are identical across
/// standard library implementations.
class Rng {
 public:
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
      : engine_(derive_key(seed, keys)) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return to_unit(engine_()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], rejection-sampled to avoid modulo bias.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qnet
