#include "pmvr/random.hpp"

#include <cmath>
#include <numbers>

#include "pmvr/error.hpp"

namespace pmvr {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t stream_index(StreamPurpose purpose, std::uint64_t level, std::uint64_t iteration) {
  if (level >= (std::uint64_t{1} << kLevelBits))
    throw InvalidArgument("stream_index: level out of range");
  if (iteration >= (std::uint64_t{1} << kIterationBits))
    throw InvalidArgument("stream_index: iteration out of range");
  return (static_cast<std::uint64_t>(purpose) << (kIterationBits + kLevelBits)) |
         (level << kIterationBits) | iteration;
}

void RandomSource::refill() noexcept {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                            static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = philox4x32_10(ctr, key);
  ++block_;
  buffered_ = 2;
}

RandomSource::result_type RandomSource::operator()() noexcept {
  if (buffered_ == 0) refill();
  const int slot = 2 - buffered_;
  --buffered_;
  return static_cast<std::uint64_t>(buffer_[2 * slot]) |
         (static_cast<std::uint64_t>(buffer_[2 * slot + 1]) << 32);
}

double RandomSource::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

namespace {
__extension__ using u128 = unsigned __int128;
}  // namespace

std::uint64_t RandomSource::uniform_index(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("uniform_index: empty range");
  u128 m = static_cast<u128>((*this)()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>((*this)()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RandomSource::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Point gaussian_sample(RandomSource& rng, double mean, double variance, Shape shape) {
  if (!(variance >= 0.0)) throw InvalidArgument("gaussian_sample: negative variance");
  Point out(shape, mean);
  if (variance == 0.0) return out;
  const double sd = std::sqrt(variance);
  for (double& v : out.mutable_data()) v = mean + sd * rng.normal();
  return out;
}

}  // namespace pmvr
