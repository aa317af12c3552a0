#include "gradest/problems.hpp"

#include "gradest/rng.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace gradest {
namespace {

using Vec = Vector<double>;
using Mat = Matrix<double>;

/// Residual vector and Jacobian at x.
using ResidualFn = std::function<std::pair<Vec, Mat>(const Vec&)>;

/// phi = sum_i r_i(x)^2 with gradient 2 J^T r.
ObjectiveFunction<double> least_squares(Index n, ResidualFn residual) {
  ObjectiveFunction<double> f;
  f.n = n;
  f.value = [residual](const Vec& x) { return residual(x).first.squaredNorm(); };
  f.gradient = [residual](const Vec& x) -> Vec {
    auto [r, J] = residual(x);
    return 2.0 * J.transpose() * r;
  };
  return f;
}

StandardProblem finish(std::string name, ObjectiveFunction<double> f, Vec x0, std::optional<double> f_star) {
  if (f.lipschitz_gradient == 0.0) {
    f.lipschitz_gradient = estimate_local_lipschitz(f, x0, 1.0, 200, 0x5eed);
  }
  return {std::move(name), std::move(f), std::move(x0), f_star};
}

StandardProblem linear_problem() {
  const Vec a = Vec::Ones(3);
  return {"linear", make_linear<double>(a), Vec::Zero(3), std::nullopt};
}

StandardProblem quadratic_problem() {
  auto f = make_quadratic<double>(Mat::Identity(4, 4), Vec::Zero(4));
  return {"quadratic", std::move(f), Vec::Ones(4), 0.0};
}

/// A = diag(10^{2i/(n-1)}), eigenvalues from 1 to 100, b = 1.
StandardProblem quadratic_illcond_problem() {
  constexpr Index n = 10;
  Vec diag(n);
  for (Index i = 0; i < n; ++i) diag[i] = std::pow(10.0, 2.0 * static_cast<double>(i) / (n - 1));
  const Vec b = Vec::Ones(n);
  auto f = make_quadratic<double>(Mat(diag.asDiagonal()), b);
  const double f_star = -0.5 * b.dot(diag.cwiseInverse().cwiseProduct(b));
  return {"quadratic_illcond", std::move(f), Vec::Zero(n), f_star};
}

/// Extended Rosenbrock: pairs (x_{2i}, x_{2i+1}) with 100 (x_{2i+1} - x_{2i}^2)^2 + (1 - x_{2i})^2.
StandardProblem rosenbrock_problem(Index n, std::string name) {
  auto residual = [n](const Vec& x) {
    Vec r(n);
    Mat J = Mat::Zero(n, n);
    for (Index i = 0; i < n; i += 2) {
      r[i] = 10.0 * (x[i + 1] - x[i] * x[i]);
      J(i, i) = -20.0 * x[i];
      J(i, i + 1) = 10.0;
      r[i + 1] = 1.0 - x[i];
      J(i + 1, i) = -1.0;
    }
    return std::pair{r, J};
  };
  Vec x0(n);
  for (Index i = 0; i < n; i += 2) {
    x0[i] = -1.2;
    x0[i + 1] = 1.0;
  }
  return finish(std::move(name), least_squares(n, residual), x0, 0.0);
}

/// Extended Powell singular function, blocks of four starting at (3, -1, 0, 1).
StandardProblem powell_singular_problem(Index n) {
  auto residual = [n](const Vec& x) {
    Vec r(n);
    Mat J = Mat::Zero(n, n);
    const double s5 = std::sqrt(5.0);
    const double s10 = std::sqrt(10.0);
    for (Index i = 0; i < n; i += 4) {
      r[i] = x[i] + 10.0 * x[i + 1];
      J(i, i) = 1.0;
      J(i, i + 1) = 10.0;
      r[i + 1] = s5 * (x[i + 2] - x[i + 3]);
      J(i + 1, i + 2) = s5;
      J(i + 1, i + 3) = -s5;
      const double d2 = x[i + 1] - 2.0 * x[i + 2];
      r[i + 2] = d2 * d2;
      J(i + 2, i + 1) = 2.0 * d2;
      J(i + 2, i + 2) = -4.0 * d2;
      const double d3 = x[i] - x[i + 3];
      r[i + 3] = s10 * d3 * d3;
      J(i + 3, i) = 2.0 * s10 * d3;
      J(i + 3, i + 3) = -2.0 * s10 * d3;
    }
    return std::pair{r, J};
  };
  Vec x0(n);
  for (Index i = 0; i < n; i += 4) x0.segment(i, 4) << 3.0, -1.0, 0.0, 1.0;
  return finish("powell_singular", least_squares(n, residual), x0, 0.0);
}

/// r_i = n - sum_j cos x_j + (i+1)(1 - cos x_i) - sin x_i, x0 = 1/n.
StandardProblem trigonometric_problem(Index n) {
  auto residual = [n](const Vec& x) {
    const double cos_sum = x.array().cos().sum();
    Vec r(n);
    Mat J(n, n);
    for (Index i = 0; i < n; ++i) {
      const double k = static_cast<double>(i + 1);
      r[i] = static_cast<double>(n) - cos_sum + k * (1.0 - std::cos(x[i])) - std::sin(x[i]);
      for (Index j = 0; j < n; ++j) J(i, j) = std::sin(x[j]);
      J(i, i) += k * std::sin(x[i]) - std::cos(x[i]);
    }
    return std::pair{r, J};
  };
  return finish("trigonometric", least_squares(n, residual), Vec::Constant(n, 1.0 / static_cast<double>(n)),
                0.0);
}

StandardProblem helical_valley_problem() {
  auto residual = [](const Vec& x) {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    const double rho2 = x[0] * x[0] + x[1] * x[1];
    const double rho = std::sqrt(rho2);
    // Branch of the angle used by the classical definition: continuous
    // everywhere except where the first coordinate vanishes.
    double theta = 0.0;
    if (x[0] > 0.0) {
      theta = std::atan(x[1] / x[0]) / kTwoPi;
    } else if (x[0] < 0.0) {
      theta = std::atan(x[1] / x[0]) / kTwoPi + 0.5;
    } else {
      theta = x[1] >= 0.0 ? 0.25 : -0.25;
    }
    Vec r(3);
    Mat J = Mat::Zero(3, 3);
    r[0] = 10.0 * (x[2] - 10.0 * theta);
    // d theta / d x = (-x1, x0) / (2 pi rho^2)
    J(0, 0) = 100.0 * x[1] / (kTwoPi * rho2);
    J(0, 1) = -100.0 * x[0] / (kTwoPi * rho2);
    J(0, 2) = 10.0;
    r[1] = 10.0 * (rho - 1.0);
    J(1, 0) = 10.0 * x[0] / rho;
    J(1, 1) = 10.0 * x[1] / rho;
    r[2] = x[2];
    J(2, 2) = 1.0;
    return std::pair{r, J};
  };
  Vec x0(3);
  x0 << -1.0, 0.0, 0.0;
  return finish("helical_valley", least_squares(3, residual), x0, 0.0);
}

StandardProblem beale_problem() {
  auto residual = [](const Vec& x) {
    const double y[3] = {1.5, 2.25, 2.625};
    Vec r(3);
    Mat J(3, 2);
    for (int i = 0; i < 3; ++i) {
      const int k = i + 1;
      const double p = std::pow(x[1], k);
      r[i] = y[i] - x[0] * (1.0 - p);
      J(i, 0) = -(1.0 - p);
      J(i, 1) = x[0] * k * std::pow(x[1], k - 1);
    }
    return std::pair{r, J};
  };
  return finish("beale", least_squares(2, residual), Vec::Ones(2), 0.0);
}

StandardProblem wood_problem() {
  ObjectiveFunction<double> f;
  f.n = 4;
  f.value = [](const Vec& x) {
    const double a = x[1] - x[0] * x[0];
    const double b = x[3] - x[2] * x[2];
    return 100.0 * a * a + (1.0 - x[0]) * (1.0 - x[0]) + 90.0 * b * b + (1.0 - x[2]) * (1.0 - x[2]) +
           10.1 * ((x[1] - 1.0) * (x[1] - 1.0) + (x[3] - 1.0) * (x[3] - 1.0)) +
           19.8 * (x[1] - 1.0) * (x[3] - 1.0);
  };
  f.gradient = [](const Vec& x) -> Vec {
    const double a = x[1] - x[0] * x[0];
    const double b = x[3] - x[2] * x[2];
    Vec g(4);
    g[0] = -400.0 * a * x[0] - 2.0 * (1.0 - x[0]);
    g[1] = 200.0 * a + 20.2 * (x[1] - 1.0) + 19.8 * (x[3] - 1.0);
    g[2] = -360.0 * b * x[2] - 2.0 * (1.0 - x[2]);
    g[3] = 180.0 * b + 20.2 * (x[3] - 1.0) + 19.8 * (x[1] - 1.0);
    return g;
  };
  Vec x0(4);
  x0 << -3.0, -1.0, -3.0, -1.0;
  return finish("wood", std::move(f), x0, 0.0);
}

/// r_i = x_i + sum_j x_j - (n + 1) for i < n-1, r_{n-1} = prod_j x_j - 1.
StandardProblem brown_almost_linear_problem(Index n) {
  auto residual = [n](const Vec& x) {
    const double sum = x.sum();
    Vec r(n);
    Mat J = Mat::Ones(n, n);
    for (Index i = 0; i + 1 < n; ++i) {
      r[i] = x[i] + sum - static_cast<double>(n + 1);
      J(i, i) = 2.0;
    }
    r[n - 1] = x.prod() - 1.0;
    for (Index j = 0; j < n; ++j) {
      double p = 1.0;
      for (Index k = 0; k < n; ++k) {
        if (k != j) p *= x[k];
      }
      J(n - 1, j) = p;
    }
    return std::pair{r, J};
  };
  return finish("brown_almost_linear", least_squares(n, residual), Vec::Constant(n, 0.5), 0.0);
}

/// r_i = (3 - 2 x_i) x_i - x_{i-1} - 2 x_{i+1} + 1 with x_{-1} = x_n = 0.
StandardProblem broyden_tridiagonal_problem(Index n) {
  auto residual = [n](const Vec& x) {
    Vec r(n);
    Mat J = Mat::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      const double prev = i > 0 ? x[i - 1] : 0.0;
      const double next = i + 1 < n ? x[i + 1] : 0.0;
      r[i] = (3.0 - 2.0 * x[i]) * x[i] - prev - 2.0 * next + 1.0;
      J(i, i) = 3.0 - 4.0 * x[i];
      if (i > 0) J(i, i - 1) = -1.0;
      if (i + 1 < n) J(i, i + 1) = -2.0;
    }
    return std::pair{r, J};
  };
  return finish("broyden_tridiagonal", least_squares(n, residual), Vec::Constant(n, -1.0), 0.0);
}

StandardProblem sincos_problem() {
  return {"sincos", make_sincos<double>(20, 1.0, 2.0), Vec::Zero(20), std::nullopt};
}

}  // namespace

double estimate_local_lipschitz(const ObjectiveFunction<double>& objective, const Vec& center, double radius,
                                int points, std::uint64_t seed) {
  constexpr int kPowerIterations = 30;
  constexpr double kStep = 1e-6;
  RngStream rng(seed, 0);
  const Index n = objective.n;
  double best = 0.0;
  Vec x(n), v(n);
  for (int p = 0; p < points; ++p) {
    for (Index i = 0; i < n; ++i) x[i] = center[i] + rng.uniform(-radius, radius);
    for (Index i = 0; i < n; ++i) v[i] = rng.normal();
    v.normalize();
    const Vec g0 = objective.gradient(x);
    double lambda = 0.0;
    for (int it = 0; it < kPowerIterations; ++it) {
      const Vec hv = (objective.gradient(x + kStep * v) - g0) / kStep;
      lambda = hv.norm();
      if (!(lambda > 0.0)) break;
      v = hv / lambda;
    }
    best = std::max(best, lambda);
  }
  return best;
}

std::vector<Vec> descent_points(const ObjectiveFunction<double>& objective, const Vec& x0, int count) {
  if (count < 1) throw std::invalid_argument("descent_points: count must be positive");
  const double L = objective.lipschitz_gradient > 0.0 ? objective.lipschitz_gradient : 1.0;
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  Vec x = x0;
  constexpr int kStepsBetweenPoints = 5;
  for (int k = 0; k < count; ++k) {
    out.push_back(x);
    for (int s = 0; s < kStepsBetweenPoints; ++s) x -= objective.gradient(x) / L;
  }
  return out;
}

std::vector<StandardProblem> make_standard_problems() {
  std::vector<StandardProblem> out;
  out.push_back(linear_problem());
  for (auto& p : benchmark_problems()) out.push_back(std::move(p));
  return out;
}

std::vector<StandardProblem> benchmark_problems() {
  std::vector<StandardProblem> out;
  out.push_back(quadratic_problem());
  out.push_back(quadratic_illcond_problem());
  out.push_back(rosenbrock_problem(2, "rosenbrock"));
  out.push_back(rosenbrock_problem(10, "rosenbrock10"));
  out.push_back(powell_singular_problem(8));
  out.push_back(trigonometric_problem(10));
  out.push_back(helical_valley_problem());
  out.push_back(beale_problem());
  out.push_back(wood_problem());
  out.push_back(brown_almost_linear_problem(10));
  out.push_back(broyden_tridiagonal_problem(10));
  out.push_back(sincos_problem());
  return out;
}

std::optional<StandardProblem> find_problem(std::string_view name) {
  for (auto& p : make_standard_problems()) {
    if (p.name == name) return std::move(p);
  }
  return std::nullopt;
}

std::vector<std::string> problem_names() {
  std::vector<std::string> names;
  for (const auto& p : make_standard_problems()) names.push_back(p.name);
  return names;
}

}  // namespace gradest
