#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "pmvr/point.hpp"

namespace pmvr {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Substream namespaces. A stream index is `purpose << 56 | level << 40 | iteration`.
enum class StreamPurpose : std::uint64_t {
  kSamples = 0,
  kTau = 1,
  kPowerIteration = 2,
  kDataGeneration = 3,
  kTest = 4,
};

constexpr std::uint64_t kIterationBits = 40;
constexpr std::uint64_t kLevelBits = 16;

/// Stream index for the batch drawn at `level` (1-based) and `iteration`.
std::uint64_t stream_index(StreamPurpose purpose, std::uint64_t level, std::uint64_t iteration);

/// Counter-based random source. The 128-bit Philox counter is split into a
/// 64-bit stream index and a 64-bit block counter, and the key is the 64-bit
/// seed, so distinct (seed, stream) pairs address disjoint parts of the
/// Philox output space. The integer sequence is identical on every platform.
///
/// Single-owner: copy it deliberately, derive substreams with `substream`.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Independent source for another stream under the same seed.
  RandomSource substream(std::uint64_t stream) const noexcept { return RandomSource(seed_, stream); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, n), n > 0 (Lemire's multiply-shift with rejection).
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal via the Box-Muller transform (caches the second variate).
  double normal() noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Point of the given shape with i.i.d. N(mean, variance) entries.
Point gaussian_sample(RandomSource& rng, double mean, double variance, Shape shape);

}  // namespace pmvr
