#pragma once

#include "gradest/errors.hpp"
#include "gradest/estimators.hpp"
#include "gradest/lbfgs.hpp"
#include "gradest/line_search.hpp"
#include "gradest/oracle.hpp"
#include "gradest/rng.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <type_traits>
#include <vector>

namespace gradest {

enum class Termination { grad_norm_stop, max_iters, eval_budget, step_failure, diverged, non_finite };

inline constexpr std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::grad_norm_stop: return "grad_norm_stop";
    case Termination::max_iters: return "max_iters";
    case Termination::eval_budget: return "eval_budget";
    case Termination::step_failure: return "step_failure";
    case Termination::diverged: return "diverged";
    case Termination::non_finite: return "non_finite";
  }
  return "?";
}

/// State after iteration `iter`. `f` is the noisy value the algorithm used,
/// `phi` the noise-free value; `evals` counts oracle calls since the start.
template <typename Scalar = double>
struct IterationRecord {
  std::int64_t iter = 0;
  Vector<Scalar> x;
  Scalar f = Scalar(0);
  Scalar phi = Scalar(0);
  Scalar grad_est_norm = Scalar(0);
  std::optional<Scalar> true_grad_norm;
  Scalar alpha = Scalar(0);
  std::uint64_t evals = 0;
  int backtracks = 0;
  /// Directional slope g^T d used by the accepted Armijo test (0 at iter 0).
  Scalar slope = Scalar(0);
  /// f at the previous iterate, the reference of the Armijo test.
  Scalar f_prev = Scalar(0);
};

template <typename Scalar = double>
struct OptimizationTrace {
  std::vector<IterationRecord<Scalar>> records;
  Termination termination = Termination::max_iters;
  bool diverged = false;
  /// Oracle calls over the whole run, including trial points after the last record.
  std::uint64_t total_evals = 0;

  const IterationRecord<Scalar>& final() const { return records.back(); }
};

namespace detail {

template <typename Scalar>
IterationRecord<Scalar> make_record(const NoisyOracle<Scalar>& oracle, std::int64_t iter,
                                    const Vector<Scalar>& x, Scalar f, const Vector<Scalar>& g,
                                    std::uint64_t evals) {
  IterationRecord<Scalar> r;
  r.iter = iter;
  r.x = x;
  r.f = f;
  r.phi = oracle.true_value(x);
  r.grad_est_norm = g.norm();
  r.true_grad_norm = oracle.true_gradient(x).norm();
  r.evals = evals;
  return r;
}

/// Gradient estimate with one retry on SingularDirections.
template <typename Scalar>
GradientEstimate<Scalar> estimate_with_retry(NoisyOracle<Scalar>& oracle, const Vector<Scalar>& x,
                                             const EstimatorConfig<Scalar>& cfg, RngStream& rng,
                                             std::optional<Scalar> f_x) {
  try {
    return estimate(oracle, x, cfg, rng, f_x);
  } catch (const SingularDirections&) {
    if (cfg.method != Method::LI || cfg.directions) throw;
    return estimate(oracle, x, cfg, rng, f_x);
  }
}

}  // namespace detail

/// Line-search DFO: x_{k+1} = x_k + alpha_k d_k with d_k = -g_k or the
/// L-BFGS direction, alpha_k from Armijo backtracking.
///
/// An iteration starts only when the budget covers one gradient estimate
/// plus one trial point; backtracking may exceed the budget by at most
/// max_backtracks evaluations. After a StepFailure the gradient is
/// re-estimated (randomized methods) and alpha0 is halved; three consecutive
/// failures terminate the run.
template <typename Scalar>
OptimizationTrace<Scalar> run_dfo(NoisyOracle<Scalar>& oracle, const EstimatorConfig<Scalar>& est_cfg,
                                  const LineSearchConfig& ls_cfg,
                                  const std::type_identity_t<Vector<Scalar>>& x0, RngStream& rng) {
  est_cfg.validate();
  ls_cfg.validate();
  constexpr int kMaxConsecutiveFailures = 3;
  const std::uint64_t start = oracle.eval_count();
  const auto used = [&] { return oracle.eval_count() - start; };
  const std::uint64_t est_cost = expected_evals(est_cfg.method, x0.size(), est_cfg.N);

  OptimizationTrace<Scalar> trace;
  Vector<Scalar> x = x0;
  Scalar f = oracle.evaluate(x);
  auto est = detail::estimate_with_retry(oracle, x, est_cfg, rng, std::optional<Scalar>(f));
  Vector<Scalar> g = est.g;
  trace.records.push_back(detail::make_record(oracle, 0, x, f, g, used()));
  trace.records.back().f_prev = f;

  const Scalar stop =
      static_cast<Scalar>(ls_cfg.grad_norm_stop.value_or(1e-6 * static_cast<double>(g.norm())));
  LbfgsHistory<Scalar> history(ls_cfg.memory);
  double alpha0 = ls_cfg.alpha0;
  int failures = 0;

  for (std::int64_t k = 1;; ++k) {
    if (!g.allFinite() || !std::isfinite(static_cast<double>(f))) {
      trace.termination = Termination::non_finite;
      break;
    }
    if (g.norm() <= stop) {
      trace.termination = Termination::grad_norm_stop;
      break;
    }
    if (k > ls_cfg.max_iters) {
      trace.termination = Termination::max_iters;
      break;
    }
    if (used() + est_cost + 1 > ls_cfg.eval_budget) {
      trace.termination = Termination::eval_budget;
      break;
    }

    Vector<Scalar> d = ls_cfg.direction == DirectionRule::lbfgs ? history.direction(g) : Vector<Scalar>(-g);
    if (!(g.dot(d) < Scalar(0))) {
      history.clear();
      d = -g;
    }

    LineSearchResult<Scalar> step;
    try {
      step = armijo_search(oracle, x, d, g, f, ls_cfg, alpha0);
    } catch (const StepFailure&) {
      if (++failures >= kMaxConsecutiveFailures) {
        trace.termination = Termination::step_failure;
        break;
      }
      if (is_randomized(est_cfg.method) && used() + est_cost <= ls_cfg.eval_budget) {
        est = detail::estimate_with_retry(oracle, x, est_cfg, rng, std::optional<Scalar>(f));
        g = est.g;
        history.clear();
      }
      alpha0 *= 0.5;
      --k;
      continue;
    }
    failures = 0;
    alpha0 = ls_cfg.alpha0;

    const Scalar slope = g.dot(d);
    const Scalar f_prev = f;
    const Vector<Scalar> s = step.x_new - x;
    x = step.x_new;
    f = step.f_new;

    Vector<Scalar> g_new;
    if (used() + est_cost <= ls_cfg.eval_budget) {
      est = detail::estimate_with_retry(oracle, x, est_cfg, rng, std::optional<Scalar>(f));
      g_new = est.g;
      if (ls_cfg.direction == DirectionRule::lbfgs) history.push(s, g_new - g);
    } else {
      g_new = g;
    }
    auto rec = detail::make_record(oracle, k, x, f, g_new, used());
    rec.alpha = step.alpha;
    rec.backtracks = step.backtracks;
    rec.slope = slope;
    rec.f_prev = f_prev;
    trace.records.push_back(std::move(rec));
    if (used() + est_cost > ls_cfg.eval_budget) {
      trace.termination = Termination::eval_budget;
      break;
    }
    g = g_new;
  }
  trace.total_evals = used();
  return trace;
}

/// Fixed-step steepest descent x_{k+1} = x_k - alpha g_k.
///
/// f(x_k) is evaluated every iteration (reused by forward estimators) to
/// track progress. Five consecutive increases of f flag divergence and stop
/// the run.
template <typename Scalar>
OptimizationTrace<Scalar> fixed_step_dfo(NoisyOracle<Scalar>& oracle, const EstimatorConfig<Scalar>& est_cfg,
                                         std::type_identity_t<Scalar> alpha,
                                         const std::type_identity_t<Vector<Scalar>>& x0, std::uint64_t budget,
                                         RngStream& rng,
                                         std::int64_t max_iters = std::numeric_limits<std::int64_t>::max()) {
  est_cfg.validate();
  if (!(alpha > Scalar(0))) throw std::invalid_argument("fixed step must be positive");
  constexpr int kDivergenceRun = 5;
  const std::uint64_t start = oracle.eval_count();
  const auto used = [&] { return oracle.eval_count() - start; };
  const std::uint64_t est_cost = expected_evals(est_cfg.method, x0.size(), est_cfg.N);

  OptimizationTrace<Scalar> trace;
  Vector<Scalar> x = x0;
  int increases = 0;
  Scalar f_prev = std::numeric_limits<Scalar>::infinity();
  for (std::int64_t k = 0;; ++k) {
    if (used() + est_cost + 1 > budget) {
      trace.termination = Termination::eval_budget;
      break;
    }
    const Scalar f = oracle.evaluate(x);
    const auto est = detail::estimate_with_retry(oracle, x, est_cfg, rng, std::optional<Scalar>(f));
    auto rec = detail::make_record(oracle, k, x, f, est.g, used());
    rec.alpha = k == 0 ? Scalar(0) : alpha;
    rec.f_prev = k == 0 ? f : f_prev;
    trace.records.push_back(std::move(rec));
    if (!est.g.allFinite() || !std::isfinite(static_cast<double>(f))) {
      trace.termination = Termination::non_finite;
      break;
    }
    increases = f > f_prev ? increases + 1 : 0;
    if (increases >= kDivergenceRun) {
      trace.diverged = true;
      trace.termination = Termination::diverged;
      break;
    }
    if (k + 1 >= max_iters) {
      trace.termination = Termination::max_iters;
      break;
    }
    f_prev = f;
    x -= alpha * est.g;
  }
  trace.total_evals = used();
  return trace;
}

}  // namespace gradest
