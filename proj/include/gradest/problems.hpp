#pragma once

#include "gradest/objective.hpp"
#include "gradest/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gradest {

/// A named test problem with its classical starting point.
///
/// `objective.lipschitz_gradient` is the local constant over the box
/// x0 +/- 1 (exact for quadratics, otherwise the largest sampled Hessian
/// spectral norm, see `estimate_local_lipschitz`).
struct StandardProblem {
  std::string name;
  ObjectiveFunction<double> objective;
  Vector<double> x0;
  std::optional<double> f_star;
};

/// linear, quadratic, quadratic_illcond, rosenbrock, rosenbrock10,
/// powell_singular, trigonometric, helical_valley, beale, wood,
/// brown_almost_linear, broyden_tridiagonal, sincos.
std::vector<StandardProblem> make_standard_problems();

/// The problems bounded below, used by the optimizer benchmark.
std::vector<StandardProblem> benchmark_problems();

std::optional<StandardProblem> find_problem(std::string_view name);
std::vector<std::string> problem_names();

/// Largest ||Hessian||_2 over `points` uniform draws from center +/- radius,
/// each from 30 power iterations on gradient-difference Hessian products.
double estimate_local_lipschitz(const ObjectiveFunction<double>& objective, const Vector<double>& center,
                                double radius, int points, std::uint64_t seed);

/// `count` points along a gradient descent path from x0 with step 1/L,
/// starting with x0 itself. Used as evaluation points for problem sweeps.
std::vector<Vector<double>> descent_points(const ObjectiveFunction<double>& objective,
                                           const Vector<double>& x0, int count);

}  // namespace gradest
