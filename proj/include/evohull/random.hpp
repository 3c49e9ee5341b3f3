#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace evohull {

/// Seeded pseudo-random stream. Every sample is derived from a 64-bit
/// Mersenne twister whose output sequence is fixed by the C++ standard, and
/// the distributions below are implemented here rather than taken from
/// <random>, so the same seed replays the same values on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draw_count() const noexcept { return draws_; }

  /// Independent child stream keyed by name. Children of the same parent
  /// with different names do not share draws, and deriving a child does not
  /// consume from the parent.
  RandomStream substream(std::string_view name) const;
  RandomStream substream(std::uint64_t index) const;

  std::uint64_t next_u64();
  /// Uniform on [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  bool bernoulli(double p);
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace evohull
