#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

namespace swarmtoe {

// Counter-based SplitMix64 stream.
//
// Draw n (1-based) is mix(seed + n * gamma), so a generator is fully described
// by (seed, position) and two generators with the same pair produce the same
// sequence. Streams are split by hashing a stream id into a fresh seed.
//
// Draw order contract used by the game policy:
//   coin()   consumes one draw, heads iff draw % 2 == 0
//   index(n) consumes one draw, returns draw % n
class SeededRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  constexpr explicit SeededRng(std::uint64_t seed = 0, std::uint64_t position = 0) noexcept
      : seed_(seed), position_(position) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t next() noexcept {
    ++position_;
    return mix(seed_ + position_ * kGamma);
  }

  constexpr bool coin() noexcept { return next() % 2 == 0; }

  constexpr std::size_t index(std::size_t n) noexcept {
    return static_cast<std::size_t>(next() % n);
  }

  // 53-bit uniform in [0, 1).
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Box-Muller, one normal per two draws; no cached spare so the stream
  // position alone determines the next value.
  double gaussian(double mean = 0.0, double stddev = 1.0) noexcept {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Independent child stream; does not advance this generator.
  constexpr SeededRng split(std::uint64_t stream) const noexcept {
    return SeededRng(mix(seed_ ^ mix(stream + kGamma)));
  }

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t position() const noexcept { return position_; }

  friend constexpr bool operator==(const SeededRng&, const SeededRng&) = default;

 private:
  std::uint64_t seed_;
  std::uint64_t position_;
};

}  // namespace swarmtoe
