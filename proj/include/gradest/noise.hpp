#pragma once

#include "gradest/rng.hpp"
#include "gradest/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace gradest {

enum class NoiseKind { none, uniform_iid, sinusoidal_deterministic };

inline constexpr std::string_view to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::uniform_iid: return "uniform";
    case NoiseKind::sinusoidal_deterministic: return "sinusoidal";
  }
  return "?";
}

/// Bounded noise model: every sample satisfies |eps(x)| <= level.
template <typename Scalar = double>
struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  Scalar level = Scalar(0);
  std::uint64_t seed = 0;

  static NoiseModel none() { return {}; }

  static NoiseModel uniform(Scalar level, std::uint64_t seed) {
    check_level(level);
    return {level > Scalar(0) ? NoiseKind::uniform_iid : NoiseKind::none, level, seed};
  }

  static NoiseModel sinusoidal(Scalar level) {
    check_level(level);
    return {level > Scalar(0) ? NoiseKind::sinusoidal_deterministic : NoiseKind::none, level, 0};
  }

  /// eps(x) = level * sin(c * h(x)) with h a fixed linear hash of x. High
  /// frequency, repeatable, and does not average out over repeated calls.
  Scalar deterministic_value(const Vector<Scalar>& x) const {
    constexpr double kFrequency = 1.0e3;
    constexpr double kPhi = 0.6180339887498949;
    Scalar h(0);
    for (Index i = 0; i < x.size(); ++i) {
      const double w = 1.0 + std::fmod(static_cast<double>(i + 1) * kPhi, 1.0);
      h += static_cast<Scalar>(w) * x[i];
    }
    return level * std::sin(static_cast<Scalar>(kFrequency) * h + Scalar(0.5));
  }

  /// Draws eps(x); `rng` is only consumed by uniform_iid.
  Scalar sample(const Vector<Scalar>& x, RngStream& rng) const {
    switch (kind) {
      case NoiseKind::none: return Scalar(0);
      case NoiseKind::uniform_iid: {
        const Scalar e = static_cast<Scalar>(rng.uniform(-1.0, 1.0)) * level;
        return std::clamp(e, -level, level);
      }
      case NoiseKind::sinusoidal_deterministic: return deterministic_value(x);
    }
    return Scalar(0);
  }

 private:
  static void check_level(Scalar level) {
    if (!(level >= Scalar(0)) || !std::isfinite(static_cast<double>(level))) {
      throw std::invalid_argument("noise level must be finite and nonnegative");
    }
  }
};

}  // namespace gradest
