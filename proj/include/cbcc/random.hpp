#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

namespace cbcc {

// Domain tags keep independent random streams apart when they share a seed.
enum class StreamDomain : std::uint32_t {
  kChannel = 1,
  kFadingStates = 2,
  kBlocks = 3,
  kSubsetSample = 4,
};

/// Deterministic random stream keyed by (seed, domain, indices).
///
/// Keys are fed word by word into std::seed_seq, whose output and the
/// mt19937_64 recurrence are both fixed by the standard. Uniform and Gaussian
/// draws are derived here from raw engine output rather than through the
/// <random> distributions, whose algorithms differ between standard libraries.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamDomain domain,
               std::initializer_list<std::uint64_t> indices = {}) {
    std::vector<std::uint32_t> words;
    words.reserve(3 + 2 * indices.size());
    words.push_back(static_cast<std::uint32_t>(seed));
    words.push_back(static_cast<std::uint32_t>(seed >> 32));
    words.push_back(static_cast<std::uint32_t>(domain));
    for (std::uint64_t i : indices) {
      words.push_back(static_cast<std::uint32_t>(i));
      words.push_back(static_cast<std::uint32_t>(i >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., n-1} by multiply-shift (bias below 2^-64 * n).
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  /// Circularly symmetric complex Gaussian with unit variance (Box-Muller).
  std::complex<double> complex_gaussian() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double radius = std::sqrt(-std::log(u1));  // sqrt(-2 ln u) / sqrt(2)
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  std::mt19937_64 engine_;
};

/// Counter-based stream for draws that must be a pure function of a small
/// key, such as the fading state of block t. SplitMix64 over a hash of the key.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, StreamDomain domain, std::uint64_t counter) {
    state_ = finalize(seed);
    state_ = finalize(state_ ^ static_cast<std::uint64_t>(domain));
    state_ = finalize(state_ ^ counter);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return finalize(state_);
  }

  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace cbcc
