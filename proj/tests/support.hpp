#pragma once

#include "gradest/moments.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace gradest::testing {

/// Sample mean with its standard error.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  double sq = 0.0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / (n - 1.0) / n)};
}

inline constexpr double kStandardErrors = 4.0;

inline bool within_se(const MeanSe& m, double expected, double k = kStandardErrors) {
  return std::abs(m.mean - expected) <= k * m.se;
}

/// Monte Carlo check at 4 standard errors. A failing check is run once more
/// with 4x the samples on a fresh seed before it counts as a failure.
inline bool mc_scalar_check(const std::function<MeanSe(std::int64_t, std::uint64_t)>& run, double expected,
                            std::int64_t samples, std::uint64_t seed) {
  if (within_se(run(samples, seed), expected)) return true;
  return within_se(run(4 * samples, seed ^ 0xA5A5'5A5A'F00D'BEEFULL), expected);
}

/// Upper-triangle entrywise comparison of an MC moment against `expected`.
inline bool moment_matches(const MomentEstimate<double>& m, const Matrix<double>& expected,
                           double k = kStandardErrors) {
  for (Index i = 0; i < expected.rows(); ++i) {
    for (Index j = i; j < expected.cols(); ++j) {
      // Entries with zero variance (e.g. n = 1 sphere) must match exactly.
      const double tol = std::max(k * m.std_error(i, j), 1e-12);
      if (std::abs(m.mean(i, j) - expected(i, j)) > tol) return false;
    }
  }
  return true;
}

/// Moment check with the same re-run policy as `mc_scalar_check`.
inline bool mc_moment_check(const std::function<MomentEstimate<double>(std::int64_t, std::uint64_t)>& run,
                            const Matrix<double>& expected, std::int64_t samples, std::uint64_t seed) {
  if (moment_matches(run(samples, seed), expected)) return true;
  return moment_matches(run(4 * samples, seed ^ 0xA5A5'5A5A'F00D'BEEFULL), expected);
}

}  // namespace gradest::testing
