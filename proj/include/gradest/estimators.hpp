#pragma once

#include "gradest/directions.hpp"
#include "gradest/errors.hpp"
#include "gradest/oracle.hpp"
#include "gradest/rng.hpp"
#include "gradest/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace gradest {

template <typename Scalar = double>
struct GradientEstimate {
  Vector<Scalar> g;
  Method method = Method::FFD;
  Scalar sigma = Scalar(0);
  Index N = 0;
  std::uint64_t evals_used = 0;
  /// Condition number estimate of Q (LI only).
  std::optional<Scalar> cond_q;
  /// Noisy f(x) when the estimator evaluated or received it.
  std::optional<Scalar> f_center;
};

/// Largest accepted condition estimate for the interpolation matrix.
inline constexpr double kMaxInterpolationCondition = 1e12;

namespace detail {

template <typename Scalar>
void check_sigma(Scalar sigma) {
  if (!(sigma > Scalar(0)) || !std::isfinite(static_cast<double>(sigma))) {
    throw std::invalid_argument("sigma must be positive and finite");
  }
}

template <typename Scalar>
void check_point(const NoisyOracle<Scalar>& oracle, const Vector<Scalar>& x) {
  oracle.objective().check_dimension(x);
}

/// f(x) from the caller, or one fresh evaluation counted in `evals`.
template <typename Scalar>
Scalar center_value(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                    std::optional<Scalar> f_x, std::uint64_t& evals) {
  if (f_x) return *f_x;
  ++evals;
  return oracle.evaluate(x);
}

/// scale * sum_i d_i u_i where d_i is the forward or central difference
/// quotient along row u_i of `dirs`.
template <typename Scalar>
GradientEstimate<Scalar> smoothed(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                                  std::type_identity_t<Scalar> sigma, const DirectionSet<Scalar>& dirs,
                                  Method method, Scalar scale, std::optional<Scalar> f_x) {
  check_sigma(sigma);
  check_point(oracle, x);
  if (dirs.dimension() != x.size()) throw std::invalid_argument("direction set dimension mismatch");
  GradientEstimate<Scalar> est;
  est.method = method;
  est.sigma = sigma;
  est.N = dirs.count();
  est.g = Vector<Scalar>::Zero(x.size());
  Vector<Scalar> u(x.size());
  if (is_central(method)) {
    for (Index i = 0; i < dirs.count(); ++i) {
      u = dirs.direction(i);
      const Scalar plus = oracle.evaluate(x + sigma * u);
      const Scalar minus = oracle.evaluate(x - sigma * u);
      est.g += ((plus - minus) / (Scalar(2) * sigma)) * u;
    }
    est.evals_used = 2 * static_cast<std::uint64_t>(dirs.count());
  } else {
    const Scalar f0 = center_value(oracle, x, f_x, est.evals_used);
    est.f_center = f0;
    for (Index i = 0; i < dirs.count(); ++i) {
      u = dirs.direction(i);
      est.g += ((oracle.evaluate(x + sigma * u) - f0) / sigma) * u;
    }
    est.evals_used += static_cast<std::uint64_t>(dirs.count());
  }
  est.g *= scale;
  return est;
}

}  // namespace detail

/// Forward differences along the coordinate axes; n+1 evaluations, or n
/// when f(x) is supplied.
template <typename Scalar>
GradientEstimate<Scalar> ffd(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                             std::type_identity_t<Scalar> sigma, std::optional<Scalar> f_x = std::nullopt) {
  detail::check_sigma(sigma);
  detail::check_point(oracle, x);
  const Index n = x.size();
  GradientEstimate<Scalar> est;
  est.method = Method::FFD;
  est.sigma = sigma;
  est.N = n;
  const Scalar f0 = detail::center_value(oracle, x, f_x, est.evals_used);
  est.f_center = f0;
  est.g.resize(n);
  Vector<Scalar> y = x;
  for (Index i = 0; i < n; ++i) {
    y[i] = x[i] + sigma;
    est.g[i] = (oracle.evaluate(y) - f0) / sigma;
    y[i] = x[i];
  }
  est.evals_used += static_cast<std::uint64_t>(n);
  return est;
}

/// Central differences along the coordinate axes; 2n evaluations.
template <typename Scalar>
GradientEstimate<Scalar> cfd(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                             std::type_identity_t<Scalar> sigma) {
  detail::check_sigma(sigma);
  detail::check_point(oracle, x);
  const Index n = x.size();
  GradientEstimate<Scalar> est;
  est.method = Method::CFD;
  est.sigma = sigma;
  est.N = n;
  est.g.resize(n);
  Vector<Scalar> y = x;
  for (Index i = 0; i < n; ++i) {
    y[i] = x[i] + sigma;
    const Scalar plus = oracle.evaluate(y);
    y[i] = x[i] - sigma;
    const Scalar minus = oracle.evaluate(y);
    y[i] = x[i];
    est.g[i] = (plus - minus) / (Scalar(2) * sigma);
  }
  est.evals_used = 2 * static_cast<std::uint64_t>(n);
  return est;
}

/// Solves sigma Q g = F with F_i = f(x + sigma u_i) - f(x).
///
/// Orthonormal sets use g = Q^T F / sigma. Other sets go through a partially
/// pivoted LU; its reciprocal condition estimate is recorded and a condition
/// above kMaxInterpolationCondition throws SingularDirections.
template <typename Scalar>
GradientEstimate<Scalar> linear_interp(NoisyOracle<Scalar>& oracle,
                                       const std::type_identity_t<Vector<Scalar>>& x,
                                       const DirectionSet<Scalar>& dirs, std::type_identity_t<Scalar> sigma,
                                       std::optional<Scalar> f_x = std::nullopt) {
  detail::check_sigma(sigma);
  detail::check_point(oracle, x);
  const Index n = x.size();
  if (dirs.count() != n || dirs.dimension() != n) {
    throw std::invalid_argument("linear_interp: direction matrix must be n x n");
  }
  const Matrix<Scalar>& q = dirs.matrix();

  Scalar cond(1);
  Eigen::PartialPivLU<Matrix<Scalar>> lu;
  const bool orthonormal =
      dirs.scheme() == DirectionScheme::orthonormal || dirs.scheme() == DirectionScheme::coordinate;
  if (!orthonormal) {
    lu.compute(q);
    // The pivot ratio of U is a lower bound on cond(Q); it catches exactly
    // singular matrices where the rcond estimate is unreliable.
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const Scalar pivot_ratio = pivots.minCoeff() > Scalar(0) ? pivots.maxCoeff() / pivots.minCoeff()
                                                             : std::numeric_limits<Scalar>::infinity();
    const Scalar rcond = lu.rcond();
    cond = rcond > Scalar(0) ? std::max(Scalar(1) / rcond, pivot_ratio)
                             : std::numeric_limits<Scalar>::infinity();
    if (!(cond <= static_cast<Scalar>(kMaxInterpolationCondition))) {
      throw SingularDirections("interpolation directions are numerically singular",
                               static_cast<double>(cond));
    }
  }

  GradientEstimate<Scalar> est;
  est.method = Method::LI;
  est.sigma = sigma;
  est.N = n;
  const Scalar f0 = detail::center_value(oracle, x, f_x, est.evals_used);
  est.f_center = f0;
  Vector<Scalar> F(n);
  for (Index i = 0; i < n; ++i) F[i] = oracle.evaluate(x + sigma * dirs.direction(i)) - f0;
  est.evals_used += static_cast<std::uint64_t>(n);

  est.g = orthonormal ? Vector<Scalar>(q.transpose() * F / sigma) : Vector<Scalar>(lu.solve(F) / sigma);
  est.cond_q = cond;
  return est;
}

/// (1/N) sum_i [(f(x + sigma u_i) - f(x)) / sigma] u_i over the rows of `dirs`.
template <typename Scalar>
GradientEstimate<Scalar> gsg(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                             std::type_identity_t<Scalar> sigma, const DirectionSet<Scalar>& dirs,
                             std::optional<Scalar> f_x = std::nullopt) {
  return detail::smoothed(oracle, x, sigma, dirs, Method::GSG, Scalar(1) / static_cast<Scalar>(dirs.count()),
                          f_x);
}

template <typename Scalar>
GradientEstimate<Scalar> gsg(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                             std::type_identity_t<Scalar> sigma, Index N, RngStream& rng,
                             std::optional<Scalar> f_x = std::nullopt) {
  return gsg(oracle, x, sigma, gaussian_directions<Scalar>(x.size(), N, rng), f_x);
}

/// (1/N) sum_i [(f(x + sigma u_i) - f(x - sigma u_i)) / (2 sigma)] u_i.
template <typename Scalar>
GradientEstimate<Scalar> cgsg(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                              std::type_identity_t<Scalar> sigma, const DirectionSet<Scalar>& dirs) {
  return detail::smoothed(oracle, x, sigma, dirs, Method::cGSG, Scalar(1) / static_cast<Scalar>(dirs.count()),
                          std::optional<Scalar>{});
}

template <typename Scalar>
GradientEstimate<Scalar> cgsg(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                              std::type_identity_t<Scalar> sigma, Index N, RngStream& rng) {
  return cgsg(oracle, x, sigma, gaussian_directions<Scalar>(x.size(), N, rng));
}

/// (n/N) sum_i [(f(x + sigma u_i) - f(x)) / sigma] u_i with unit-norm rows.
template <typename Scalar>
GradientEstimate<Scalar> bsg(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                             std::type_identity_t<Scalar> sigma, const DirectionSet<Scalar>& dirs,
                             std::optional<Scalar> f_x = std::nullopt) {
  return detail::smoothed(oracle, x, sigma, dirs, Method::BSG,
                          static_cast<Scalar>(x.size()) / static_cast<Scalar>(dirs.count()), f_x);
}

template <typename Scalar>
GradientEstimate<Scalar> bsg(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                             std::type_identity_t<Scalar> sigma, Index N, RngStream& rng,
                             std::optional<Scalar> f_x = std::nullopt) {
  return bsg(oracle, x, sigma, sphere_directions<Scalar>(x.size(), N, rng), f_x);
}

/// (n/N) sum_i [(f(x + sigma u_i) - f(x - sigma u_i)) / (2 sigma)] u_i.
template <typename Scalar>
GradientEstimate<Scalar> cbsg(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                              std::type_identity_t<Scalar> sigma, const DirectionSet<Scalar>& dirs) {
  return detail::smoothed(oracle, x, sigma, dirs, Method::cBSG,
                          static_cast<Scalar>(x.size()) / static_cast<Scalar>(dirs.count()),
                          std::optional<Scalar>{});
}

template <typename Scalar>
GradientEstimate<Scalar> cbsg(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                              std::type_identity_t<Scalar> sigma, Index N, RngStream& rng) {
  return cbsg(oracle, x, sigma, sphere_directions<Scalar>(x.size(), N, rng));
}

/// Forms without the baseline f(x): their variance grows like 1/sigma^2 and
/// they exist only to exhibit that growth.
namespace pedagogical {

template <typename Scalar>
GradientEstimate<Scalar> ncgsg(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                               std::type_identity_t<Scalar> sigma, Index N, RngStream& rng) {
  detail::check_sigma(sigma);
  const auto dirs = gaussian_directions<Scalar>(x.size(), N, rng);
  GradientEstimate<Scalar> est;
  est.method = Method::GSG;
  est.sigma = sigma;
  est.N = N;
  est.g = Vector<Scalar>::Zero(x.size());
  for (Index i = 0; i < N; ++i) {
    const Vector<Scalar> u = dirs.direction(i);
    est.g += (oracle.evaluate(x + sigma * u) / sigma) * u;
  }
  est.g /= static_cast<Scalar>(N);
  est.evals_used = static_cast<std::uint64_t>(N);
  return est;
}

}  // namespace pedagogical

/// Estimator selection. `directions` fixes the LI set; otherwise LI draws a
/// fresh set of `li_scheme` from the stream on every call.
template <typename Scalar = double>
struct EstimatorConfig {
  Method method = Method::FFD;
  Scalar sigma = Scalar(1e-2);
  Index N = 0;
  std::optional<DirectionSet<Scalar>> directions;
  DirectionScheme li_scheme = DirectionScheme::general_interp;
  std::uint64_t seed = 0;

  void validate() const {
    detail::check_sigma(sigma);
    if (is_smoothing(method) && N < 1) throw std::invalid_argument("smoothing estimators need N >= 1");
  }
};

template <typename Scalar>
DirectionSet<Scalar> draw_interpolation_set(DirectionScheme scheme, Index n, RngStream& rng) {
  switch (scheme) {
    case DirectionScheme::coordinate: return coordinate_directions<Scalar>(n);
    case DirectionScheme::orthonormal: return orthonormal_directions<Scalar>(n, rng);
    case DirectionScheme::general_interp: return interpolation_directions<Scalar>(n, rng);
    case DirectionScheme::gaussian: return gaussian_directions<Scalar>(n, n, rng);
    case DirectionScheme::sphere: return sphere_directions<Scalar>(n, n, rng);
  }
  throw std::invalid_argument("unknown direction scheme");
}

/// Runs the configured estimator. A supplied f(x) is reused by the forward
/// methods and is not counted in evals_used.
template <typename Scalar>
GradientEstimate<Scalar> estimate(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x,
                                  const EstimatorConfig<Scalar>& cfg, RngStream& rng,
                                  std::optional<Scalar> f_x = std::nullopt) {
  cfg.validate();
  switch (cfg.method) {
    case Method::FFD: return ffd(oracle, x, cfg.sigma, f_x);
    case Method::CFD: return cfd(oracle, x, cfg.sigma);
    case Method::LI:
      if (cfg.directions) return linear_interp(oracle, x, *cfg.directions, cfg.sigma, f_x);
      return linear_interp(oracle, x, draw_interpolation_set<Scalar>(cfg.li_scheme, x.size(), rng), cfg.sigma,
                           f_x);
    case Method::GSG: return gsg(oracle, x, cfg.sigma, cfg.N, rng, f_x);
    case Method::cGSG: return cgsg(oracle, x, cfg.sigma, cfg.N, rng);
    case Method::BSG: return bsg(oracle, x, cfg.sigma, cfg.N, rng, f_x);
    case Method::cBSG: return cbsg(oracle, x, cfg.sigma, cfg.N, rng);
  }
  throw std::invalid_argument("unknown method");
}

/// Evaluations one call of `method` costs in dimension n with N samples.
inline std::uint64_t expected_evals(Method method, Index n, Index N) {
  const auto un = static_cast<std::uint64_t>(n);
  const auto uN = static_cast<std::uint64_t>(N);
  switch (method) {
    case Method::FFD:
    case Method::LI: return un + 1;
    case Method::CFD: return 2 * un;
    case Method::GSG:
    case Method::BSG: return uN + 1;
    case Method::cGSG:
    case Method::cBSG: return 2 * uN;
  }
  return 0;
}

/// theta = ||g - grad|| / ||grad||.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar relative_error(const Eigen::MatrixBase<DerivedA>& g,
                                         const Eigen::MatrixBase<DerivedB>& grad_true) {
  using Scalar = typename DerivedA::Scalar;
  if (g.size() != grad_true.size()) throw std::invalid_argument("relative_error: size mismatch");
  const Scalar denom = grad_true.norm();
  if (!(denom > Scalar(0))) throw ZeroGradient("relative_error: true gradient is zero");
  return (g - grad_true).norm() / denom;
}

}  // namespace gradest
