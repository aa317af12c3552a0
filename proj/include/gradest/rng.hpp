#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace gradest {

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based random stream.
///
/// The k-th 64-bit output is `mix64(key + (k + 1) * gamma)` where `key` is
/// derived from `(seed, stream)`; this is SplitMix64 with a keyed start
/// state, so the output only depends on integer arithmetic and is identical
/// on every platform. Independent substreams are addressed by index, which
/// is how per-trial randomness is kept reproducible under parallel runs.
///
/// Normal deviates use the Box-Muller transform (both outputs are used).
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
      : seed_(seed),
        stream_(stream),
        key_(detail::mix64(seed ^ detail::mix64(stream + detail::kGoldenGamma))) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }
  std::uint64_t position() const noexcept { return counter_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGoldenGamma);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Stream for `(seed, stream, index)`; does not advance this stream.
  RngStream substream(std::uint64_t index) const noexcept {
    return RngStream(seed_, detail::mix64(stream_ * detail::kGoldenGamma + index + 1));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream used for trial `trial` of an experiment seeded with `seed`.
/// Every experiment derives its per-trial randomness through this pairing.
inline RngStream trial_stream(std::uint64_t seed, std::uint64_t trial) noexcept {
  return RngStream(seed, trial);
}

}  // namespace gradest
