#pragma once

#include "gradest/types.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace gradest {

/// Smooth objective phi with an exact gradient oracle and its smoothness
/// constants. `lipschitz_gradient` is L (gradient Lipschitz), and
/// `lipschitz_hessian` is M (Hessian Lipschitz) when known.
template <typename Scalar = double>
struct ObjectiveFunction {
  using VectorType = Vector<Scalar>;

  Index n = 0;
  std::function<Scalar(const VectorType&)> value;
  std::function<VectorType(const VectorType&)> gradient;
  Scalar lipschitz_gradient = Scalar(0);
  std::optional<Scalar> lipschitz_hessian;

  Scalar value_at(const VectorType& x) const {
    check_dimension(x);
    return value(x);
  }

  VectorType gradient_at(const VectorType& x) const {
    check_dimension(x);
    return gradient(x);
  }

  void check_dimension(const VectorType& x) const {
    if (x.size() != n) {
      throw std::invalid_argument("dimension mismatch: expected " + std::to_string(n) + ", got " +
                                  std::to_string(x.size()));
    }
  }
};

/// phi(x) = a^T x.
template <typename Scalar>
ObjectiveFunction<Scalar> make_linear(const Vector<Scalar>& a) {
  ObjectiveFunction<Scalar> f;
  f.n = a.size();
  f.value = [a](const Vector<Scalar>& x) { return a.dot(x); };
  f.gradient = [a](const Vector<Scalar>&) { return a; };
  f.lipschitz_gradient = Scalar(0);
  f.lipschitz_hessian = Scalar(0);
  return f;
}

/// phi(x) = 1/2 x^T A x - b^T x with symmetric A.
template <typename Scalar>
ObjectiveFunction<Scalar> make_quadratic(const Matrix<Scalar>& A, const Vector<Scalar>& b) {
  if (A.rows() != A.cols() || A.rows() != b.size()) {
    throw std::invalid_argument("make_quadratic: A must be square and match b");
  }
  const Matrix<Scalar> S = (A + A.transpose()) / Scalar(2);
  ObjectiveFunction<Scalar> f;
  f.n = b.size();
  f.value = [S, b](const Vector<Scalar>& x) { return Scalar(0.5) * x.dot(S * x) - b.dot(x); };
  f.gradient = [S, b](const Vector<Scalar>& x) -> Vector<Scalar> { return S * x - b; };
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(S, Eigen::EigenvaluesOnly);
  f.lipschitz_gradient = eig.eigenvalues().cwiseAbs().maxCoeff();
  f.lipschitz_hessian = Scalar(0);
  return f;
}

/// Synthetic test function
///
///   phi(x) = sum_{i=1}^{n/2} [ M sin(x_{2i-1}) + cos(x_{2i}) ] + (L - M)/(2n) x^T 1 1^T x
///
/// with ||grad phi(0)|| = sqrt(n/2) M. The Hessian is Lipschitz with constant
/// max(M, 1). The Hessian norm is bounded by max(M, 1) + (L - M), so the
/// reported gradient Lipschitz constant is L when M >= 1 and L + (1 - M)
/// otherwise.
template <typename Scalar = double>
ObjectiveFunction<Scalar> make_sincos(Index n, Scalar M, Scalar L) {
  if (n <= 0 || n % 2 != 0) throw std::invalid_argument("make_sincos: n must be even and positive");
  if (!(M > Scalar(0))) throw std::invalid_argument("make_sincos: M must be positive");
  if (!(L > M)) throw std::invalid_argument("make_sincos: L must exceed M");
  const Scalar c = (L - M) / static_cast<Scalar>(n);
  ObjectiveFunction<Scalar> f;
  f.n = n;
  f.value = [M, c, n](const Vector<Scalar>& x) {
    Scalar s(0);
    for (Index i = 0; i < n; i += 2) s += M * std::sin(x[i]) + std::cos(x[i + 1]);
    const Scalar t = x.sum();
    return s + Scalar(0.5) * c * t * t;
  };
  f.gradient = [M, c, n](const Vector<Scalar>& x) {
    Vector<Scalar> g(n);
    const Scalar t = c * x.sum();
    for (Index i = 0; i < n; i += 2) {
      g[i] = M * std::cos(x[i]) + t;
      g[i + 1] = -std::sin(x[i + 1]) + t;
    }
    return g;
  };
  f.lipschitz_gradient = M >= Scalar(1) ? L : L + (Scalar(1) - M);
  f.lipschitz_hessian = std::max(M, Scalar(1));
  return f;
}

}  // namespace gradest
