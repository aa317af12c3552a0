#pragma once

#include "gradest/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace gradest {

/// Inputs shared by the closed-form bounds. `M` is required by the central
/// methods; `cond_qinv` (||Q^{-1}||_2) by LI.
struct BoundQuery {
  Method method = Method::FFD;
  Index n = 1;
  double L = 0.0;
  std::optional<double> M;
  double eps_f = 0.0;
  double theta = 0.5;
  double delta = 0.1;
  std::optional<double> grad_norm;
  std::optional<double> cond_qinv;
  std::optional<double> sigma;
};

/// One row of the condition tables for a query.
///
/// `interval_empty` is set when the gradient norm is known and below
/// `grad_norm_min`; `sigma_hi` is unset when the gradient norm is unknown.
struct BoundReport {
  Method method = Method::FFD;
  std::optional<double> sigma_lo;
  std::optional<double> sigma_hi;
  bool interval_empty = false;
  std::int64_t n_min = 0;
  bool n_min_is_dimension = false;
  double rho = 0.0;
  double grad_norm_min = 0.0;
  std::optional<double> lambda_used;
};

namespace detail {

inline void require_positive_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive");
}

inline void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be finite and nonnegative");
  }
}

inline void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

inline void require_theta(double theta) {
  if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in [0, 1)");
}

inline double require_M(const std::optional<double>& M, Method method) {
  if (!M) throw std::invalid_argument(std::string(to_string(method)) + " needs the Hessian constant M");
  require_nonnegative(*M, "M");
  return *M;
}

inline std::int64_t ceil_count(double value) {
  if (!std::isfinite(value)) throw std::overflow_error("sample size is not finite");
  return static_cast<std::int64_t>(std::ceil(value));
}

}  // namespace detail

/// Worst-case ||g - grad phi|| for the deterministic methods:
///   FFD: sqrt(n) L sigma / 2 + 2 sqrt(n) eps / sigma
///   CFD: sqrt(n) M sigma^2 / 6 + sqrt(n) eps / sigma
///   LI:  ||Q^{-1}|| (sqrt(n) L sigma / 2 + 2 sqrt(n) eps / sigma)
inline double deterministic_error_bound(Method method, Index n, double L, std::optional<double> M,
                                        double sigma, double eps_f,
                                        std::optional<double> cond_qinv = std::nullopt) {
  detail::require_positive_sigma(sigma);
  detail::require_nonnegative(eps_f, "eps_f");
  const double rn = std::sqrt(static_cast<double>(n));
  switch (method) {
    case Method::FFD: return rn * L * sigma / 2.0 + 2.0 * rn * eps_f / sigma;
    case Method::CFD: {
      const double m = detail::require_M(M, method);
      return rn * m * sigma * sigma / 6.0 + rn * eps_f / sigma;
    }
    case Method::LI:
      if (!cond_qinv) throw std::invalid_argument("LI bound needs ||Q^{-1}||");
      return *cond_qinv * (rn * L * sigma / 2.0 + 2.0 * rn * eps_f / sigma);
    default: throw std::invalid_argument("deterministic_error_bound: not a deterministic method");
  }
}

/// Cap on ||grad F - grad phi|| for the smoothing methods:
///   GSG: sqrt(n) L sigma + sqrt(n) eps / sigma
///   cGSG: n M sigma^2 + sqrt(n) eps / sigma
///   BSG: L sigma + n eps / sigma
///   cBSG: M sigma^2 + n eps / sigma
inline double smoothing_bias_bound(Method method, Index n, double L, std::optional<double> M, double sigma,
                                   double eps_f) {
  detail::require_positive_sigma(sigma);
  detail::require_nonnegative(eps_f, "eps_f");
  const double nn = static_cast<double>(n);
  const double rn = std::sqrt(nn);
  switch (method) {
    case Method::GSG: return rn * L * sigma + rn * eps_f / sigma;
    case Method::cGSG: return nn * detail::require_M(M, method) * sigma * sigma + rn * eps_f / sigma;
    case Method::BSG: return L * sigma + nn * eps_f / sigma;
    case Method::cBSG: return detail::require_M(M, method) * sigma * sigma + nn * eps_f / sigma;
    default: throw std::invalid_argument("smoothing_bias_bound: not a smoothing method");
  }
}

/// kappa with Var(g) <= kappa I, as N times the bracketed expression.
inline double variance_kappa_numerator(Method method, Index n, double L, std::optional<double> M,
                                       double sigma, double eps_f, double grad_norm) {
  detail::require_positive_sigma(sigma);
  detail::require_nonnegative(eps_f, "eps_f");
  const double nn = static_cast<double>(n);
  const double g2 = grad_norm * grad_norm;
  const double s2 = sigma * sigma;
  const double e = eps_f;
  switch (method) {
    case Method::GSG:
      return 3.0 * g2 + (nn + 2.0) * (nn + 4.0) * L * L * s2 / 4.0 + 4.0 * e * e / s2 +
             2.0 * (nn + 2.0) * L * e;
    case Method::cGSG: {
      const double m = detail::require_M(M, method);
      return 3.0 * g2 + (nn + 2.0) * (nn + 4.0) * (nn + 8.0) * m * m * s2 * s2 / 36.0 + e * e / s2 +
             (nn + 1.0) * (nn + 3.0) * m * sigma * e / (6.0 * std::sqrt(nn));
    }
    case Method::BSG:
      return 3.0 * nn / (nn + 2.0) * g2 + nn * L * L * s2 / 4.0 + 4.0 * nn * e * e / s2 + 2.0 * nn * L * e;
    case Method::cBSG: {
      const double m = detail::require_M(M, method);
      return 3.0 * nn / (nn + 2.0) * g2 + nn * m * m * s2 * s2 / 36.0 + nn * e * e / s2 +
             nn * m * sigma * e / 3.0;
    }
    default: throw std::invalid_argument("variance_kappa: not a smoothing method");
  }
}

inline double variance_kappa(Method method, Index n, Index N, double L, std::optional<double> M, double sigma,
                             double eps_f, double grad_norm) {
  if (N < 1) throw std::invalid_argument("variance_kappa: N must be positive");
  return variance_kappa_numerator(method, n, L, M, sigma, eps_f, grad_norm) / static_cast<double>(N);
}

/// Smallest N with P(||g - grad F|| > r) <= delta by Chebyshev (GSG, cGSG):
/// ceil(n / (delta r^2) * N kappa).
inline std::int64_t chebyshev_sample_size(Method method, Index n, double delta, double r, double L,
                                          std::optional<double> M, double sigma, double eps_f,
                                          double grad_norm) {
  if (method != Method::GSG && method != Method::cGSG) {
    throw std::invalid_argument("chebyshev_sample_size applies to GSG and cGSG");
  }
  detail::require_delta(delta);
  if (!(r > 0.0)) throw std::invalid_argument("r must be positive");
  const double nn = static_cast<double>(n);
  return detail::ceil_count(nn / (delta * r * r) *
                            variance_kappa_numerator(method, n, L, M, sigma, eps_f, grad_norm));
}

/// Smallest N with P(||g - grad F|| > r) <= delta by the matrix Bernstein
/// inequality (BSG, cBSG).
inline std::int64_t bernstein_sample_size(Method method, Index n, double delta, double r, double L,
                                          std::optional<double> M, double sigma, double eps_f,
                                          double grad_norm) {
  detail::require_delta(delta);
  if (!(r > 0.0)) throw std::invalid_argument("r must be positive");
  detail::require_positive_sigma(sigma);
  detail::require_nonnegative(eps_f, "eps_f");
  const double nn = static_cast<double>(n);
  const double g = grad_norm;
  const double e = eps_f;
  const double s = sigma;
  const double log_term = std::log((nn + 1.0) / delta);
  double variance_part = 0.0;
  double range_part = 0.0;
  switch (method) {
    case Method::BSG:
      variance_part = g * g / nn + L * L * s * s / 4.0 + 4.0 * e * e / (s * s) + 2.0 * L * e;
      range_part = 2.0 * g + L * s + 4.0 * e / s;
      break;
    case Method::cBSG: {
      const double m = detail::require_M(M, method);
      variance_part = g * g / nn + m * m * s * s * s * s / 36.0 + e * e / (s * s) + m * s * e / 3.0;
      range_part = 2.0 * g + m * s * s / 3.0 + 2.0 * e / s;
      break;
    }
    default: throw std::invalid_argument("bernstein_sample_size applies to BSG and cBSG");
  }
  return detail::ceil_count((2.0 * nn * nn / (r * r) * variance_part + 2.0 * nn / (3.0 * r) * range_part) *
                            log_term);
}

/// lambda fixed per smoothing method: 1/(3 sqrt n), 1/(6 sqrt n), 1/(2 sqrt n).
inline double corollary_lambda(Method method, Index n) {
  const double rn = std::sqrt(static_cast<double>(n));
  switch (method) {
    case Method::GSG: return 1.0 / (3.0 * rn);
    case Method::cGSG: return 1.0 / (6.0 * rn);
    case Method::BSG:
    case Method::cBSG: return 1.0 / (2.0 * rn);
    default: throw std::invalid_argument("corollary_lambda: not a smoothing method");
  }
}

/// N_min of the full condition table; depends only on (method, n, theta, delta).
inline std::int64_t table_sample_size(Method method, Index n, double theta, double delta) {
  detail::require_theta(theta);
  detail::require_delta(delta);
  if (!(theta > 0.0)) throw std::invalid_argument("sample size needs theta > 0");
  if (n < 2) throw std::invalid_argument("sample size tables need n >= 2");
  const double nn = static_cast<double>(n);
  const double rn = std::sqrt(nn);
  const double inflate = nn / ((rn - 1.0) * (rn - 1.0));
  // Bernstein range term carries a single 1/(1 - lambda) factor.
  const double range = 4.0 * nn / (3.0 * theta) * rn / (rn - 1.0);
  const double log_term = std::log((nn + 1.0) / delta);
  switch (method) {
    case Method::GSG:
      return detail::ceil_count(3.0 * nn / (delta * theta * theta) * inflate + (nn + 20.0) / (16.0 * delta));
    case Method::cGSG:
      return detail::ceil_count(3.0 * nn / (delta * theta * theta) * inflate + (nn + 30.0) / (144.0 * delta));
    case Method::BSG:
      return detail::ceil_count(
          (2.0 * nn / (theta * theta) * inflate + range + (3.0 * nn + 8.0 * rn + 104.0) / 24.0) * log_term);
    case Method::cBSG:
      return detail::ceil_count(
          (2.0 * nn / (theta * theta) * inflate + range + (nn + 8.0 * rn + 192.0) / 27.0) * log_term);
    default: throw std::invalid_argument("table_sample_size: not a smoothing method");
  }
}

/// N from the simplified table valid for n >= 4.
inline std::int64_t simplified_sample_size(Method method, Index n, double theta, double delta) {
  detail::require_theta(theta);
  detail::require_delta(delta);
  if (!(theta > 0.0)) throw std::invalid_argument("sample size needs theta > 0");
  const double nn = static_cast<double>(n);
  const double log_term = std::log((nn + 1.0) / delta);
  switch (method) {
    case Method::GSG:
      return detail::ceil_count(12.0 * nn / (delta * theta * theta) + (nn + 20.0) / (16.0 * delta));
    case Method::cGSG:
      return detail::ceil_count(12.0 * nn / (delta * theta * theta) + (nn + 30.0) / (144.0 * delta));
    case Method::BSG:
      return detail::ceil_count(
          (8.0 * nn / (theta * theta) + 8.0 * nn / (3.0 * theta) + (11.0 * nn + 104.0) / 24.0) * log_term);
    case Method::cBSG:
      return detail::ceil_count(
          (8.0 * nn / (theta * theta) + 8.0 * nn / (3.0 * theta) + (9.0 * nn + 192.0) / 27.0) * log_term);
    default: throw std::invalid_argument("simplified_sample_size: not a smoothing method");
  }
}

/// Smallest ||grad phi|| for which the method's sigma interval is nonempty.
inline double grad_norm_threshold(Method method, Index n, double theta, double L, std::optional<double> M,
                                  double eps_f, std::optional<double> cond_qinv = std::nullopt) {
  detail::require_theta(theta);
  if (!(theta > 0.0)) throw std::invalid_argument("threshold needs theta > 0");
  const double nn = static_cast<double>(n);
  const double rn = std::sqrt(nn);
  switch (method) {
    case Method::FFD: return 2.0 * std::sqrt(nn * L * eps_f) / theta;
    case Method::CFD:
      return 2.0 * rn * std::cbrt(detail::require_M(M, method) * eps_f * eps_f) / (std::cbrt(6.0) * theta);
    case Method::LI:
      if (!cond_qinv) throw std::invalid_argument("LI threshold needs ||Q^{-1}||");
      return 2.0 * *cond_qinv * std::sqrt(nn * L * eps_f) / theta;
    case Method::GSG: return 6.0 * nn * std::sqrt(L * eps_f) / theta;
    case Method::cGSG:
      return 12.0 * std::cbrt(std::pow(nn, 3.5) * detail::require_M(M, method) * eps_f * eps_f) / theta;
    case Method::BSG: return 4.0 * nn * std::sqrt(L * eps_f) / theta;
    case Method::cBSG:
      return 4.0 * std::cbrt(std::pow(nn, 3.5) * detail::require_M(M, method) * eps_f * eps_f) / theta;
  }
  throw std::invalid_argument("unknown method");
}

/// Fills one condition-table row for `q`.
inline BoundReport condition_table(const BoundQuery& q) {
  detail::require_theta(q.theta);
  detail::require_nonnegative(q.eps_f, "eps_f");
  if (q.n < 1) throw std::invalid_argument("n must be positive");
  detail::require_nonnegative(q.L, "L");
  if (q.grad_norm) detail::require_nonnegative(*q.grad_norm, "grad_norm");

  const double nn = static_cast<double>(q.n);
  const double rn = std::sqrt(nn);
  const double e = q.eps_f;
  const double L = q.L;

  BoundReport r;
  r.method = q.method;
  r.grad_norm_min = grad_norm_threshold(q.method, q.n, q.theta, L, q.M, e, q.cond_qinv);
  r.rho = q.theta * r.grad_norm_min;

  std::optional<double> hi;
  const std::optional<double> g = q.grad_norm;
  switch (q.method) {
    case Method::FFD:
      r.sigma_lo = 2.0 * std::sqrt(e / L);
      if (g) hi = q.theta * *g / (rn * L);
      break;
    case Method::CFD: {
      const double m = detail::require_M(q.M, q.method);
      r.sigma_lo = std::cbrt(6.0 * e / m);
      if (g) hi = std::sqrt(3.0 * q.theta * *g / (rn * m));
      break;
    }
    case Method::LI:
      r.sigma_lo = 2.0 * std::sqrt(e / L);
      if (g) hi = q.theta * *g / (*q.cond_qinv * rn * L);
      break;
    case Method::GSG:
      r.sigma_lo = std::sqrt(e / L);
      if (g) hi = q.theta * *g / (6.0 * nn * L);
      break;
    case Method::cGSG: {
      const double m = detail::require_M(q.M, q.method);
      r.sigma_lo = std::cbrt(e / (rn * m));
      if (g) hi = std::sqrt(q.theta * *g / (12.0 * std::pow(nn, 1.5) * m));
      break;
    }
    case Method::BSG:
      r.sigma_lo = std::sqrt(nn * e / L);
      if (g) hi = q.theta * *g / (4.0 * rn * L);
      break;
    case Method::cBSG: {
      const double m = detail::require_M(q.M, q.method);
      r.sigma_lo = std::cbrt(nn * e / m);
      if (g) hi = std::sqrt(q.theta * *g / (4.0 * rn * m));
      break;
    }
  }
  if (g) {
    r.interval_empty = *g < r.grad_norm_min;
    if (!r.interval_empty) r.sigma_hi = hi;
  }

  if (is_smoothing(q.method)) {
    detail::require_delta(q.delta);
    r.n_min = table_sample_size(q.method, q.n, q.theta, q.delta);
    r.lambda_used = corollary_lambda(q.method, q.n);
  } else {
    r.n_min = q.n;
    r.n_min_is_dimension = true;
  }
  return r;
}

/// Exact FFD sigma interval: roots of sqrt(n) L sigma^2 / 2 - theta ||grad|| sigma
/// + 2 sqrt(n) eps = 0. Returns nullopt when the discriminant is negative.
struct SigmaInterval {
  double lo = 0.0;
  double hi = 0.0;
};

inline std::optional<SigmaInterval> ffd_exact_sigma_interval(Index n, double L, double eps_f, double theta,
                                                             double grad_norm) {
  if (!(L > 0.0)) throw std::invalid_argument("ffd_exact_sigma_interval needs L > 0");
  detail::require_nonnegative(eps_f, "eps_f");
  detail::require_theta(theta);
  const double nn = static_cast<double>(n);
  const double a = theta * grad_norm;
  const double disc = a * a - 4.0 * nn * L * eps_f;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  const double denom = std::sqrt(nn) * L;
  // The smaller root is formed as c / (a + root) to avoid cancellation.
  const double lo = a + root > 0.0 ? 4.0 * nn * eps_f / ((a + root) * std::sqrt(nn)) : 0.0;
  return SigmaInterval{lo, (a + root) / denom};
}

}  // namespace gradest
