#pragma once

#include "gradest/errors.hpp"
#include "gradest/oracle.hpp"
#include "gradest/types.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <type_traits>

namespace gradest {

enum class DirectionRule { steepest_descent, lbfgs };

/// Line-search DFO settings. `noise_relaxation` unset means 2 eps_f of the
/// oracle's noise model. `grad_norm_stop` unset means 1e-6 ||g(x0)||.
struct LineSearchConfig {
  double c1 = 0.2;
  double tau = 0.3;
  double alpha0 = 1.0;
  int max_backtracks = 30;
  std::optional<double> noise_relaxation;
  DirectionRule direction = DirectionRule::lbfgs;
  int memory = 10;
  std::int64_t max_iters = 10000;
  std::uint64_t eval_budget = 10000;
  std::optional<double> grad_norm_stop;

  void validate() const {
    if (!(c1 > 0.0 && c1 < 1.0)) throw std::invalid_argument("c1 must lie in (0, 1)");
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0, 1)");
    if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
    if (max_backtracks < 0) throw std::invalid_argument("max_backtracks must be nonnegative");
    if (memory < 1) throw std::invalid_argument("L-BFGS memory must be positive");
    if (max_iters < 1 || eval_budget < 1) throw std::invalid_argument("budgets must be positive");
    if (noise_relaxation && !(*noise_relaxation >= 0.0)) {
      throw std::invalid_argument("noise_relaxation must be nonnegative");
    }
  }
};

template <typename Scalar = double>
struct LineSearchResult {
  Scalar alpha = Scalar(0);
  Vector<Scalar> x_new;
  Scalar f_new = Scalar(0);
  int backtracks = 0;
};

/// Backtracking on alpha in {alpha0 tau^k}: accepts the first alpha with
///   f(x + alpha d) <= f_x + c1 alpha g^T d + relaxation.
/// Each trial costs one evaluation. Throws NotDescent when g^T d >= 0 and
/// StepFailure after `max_backtracks` rejected contractions.
template <typename Scalar>
LineSearchResult<Scalar> armijo_search(NoisyOracle<Scalar>& oracle,
                                       const std::type_identity_t<Vector<Scalar>>& x, const Vector<Scalar>& d,
                                       const Vector<Scalar>& g, Scalar f_x, const LineSearchConfig& cfg,
                                       std::optional<double> alpha0 = std::nullopt) {
  const Scalar slope = g.dot(d);
  if (!(slope < Scalar(0))) throw NotDescent("search direction is not a descent direction");
  const Scalar relax =
      static_cast<Scalar>(cfg.noise_relaxation.value_or(2.0 * static_cast<double>(oracle.noise().level)));
  const Scalar c1 = static_cast<Scalar>(cfg.c1);
  Scalar alpha = static_cast<Scalar>(alpha0.value_or(cfg.alpha0));
  LineSearchResult<Scalar> out;
  for (int k = 0; k <= cfg.max_backtracks; ++k) {
    out.x_new = x + alpha * d;
    out.f_new = oracle.evaluate(out.x_new);
    // Differencing first keeps the test strict when c1 alpha slope is below one ulp of f_x.
    if (out.f_new - f_x <= c1 * alpha * slope + relax) {
      out.alpha = alpha;
      out.backtracks = k;
      return out;
    }
    alpha *= static_cast<Scalar>(cfg.tau);
  }
  throw StepFailure("Armijo backtracking exhausted", cfg.max_backtracks);
}

}  // namespace gradest
