#pragma once

#include "gradest/rng.hpp"
#include "gradest/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace gradest {

enum class MomentDistribution { gaussian, sphere };

/// Weight w(u) multiplying u u^T in a Monte Carlo moment:
///   quad_outer(a):   (a^T u)^2
///   odd_outer(a, k): (a^T u) ||u||^k
///   norm_outer(k):   ||u||^k
template <typename Scalar = double>
struct MomentFunctional {
  enum class Kind { quad_outer, odd_outer, norm_outer };

  Kind kind = Kind::norm_outer;
  Vector<Scalar> a;
  int k = 0;

  static MomentFunctional quad_outer(Vector<Scalar> a) { return {Kind::quad_outer, std::move(a), 0}; }
  static MomentFunctional odd_outer(Vector<Scalar> a, int k) { return {Kind::odd_outer, std::move(a), k}; }
  static MomentFunctional norm_outer(int k) { return {Kind::norm_outer, {}, k}; }

  Scalar weight(const Vector<Scalar>& u) const {
    switch (kind) {
      case Kind::quad_outer: {
        const Scalar p = a.dot(u);
        return p * p;
      }
      case Kind::odd_outer: return a.dot(u) * std::pow(u.norm(), k);
      case Kind::norm_outer: return std::pow(u.norm(), k);
    }
    return Scalar(0);
  }
};

/// Sample mean of w(u) u u^T and its entrywise standard error.
template <typename Scalar = double>
struct MomentEstimate {
  Matrix<Scalar> mean;
  Matrix<Scalar> std_error;
  Index samples = 0;
};

/// Estimates several moments from one shared sample of K draws.
///
/// Accumulation is blocked: for a block U (B x n) and weights w the sums
/// U^T diag(w) U and (U.U)^T diag(w^2) (U.U) are dense products.
template <typename Scalar = double>
std::vector<MomentEstimate<Scalar>> monte_carlo_moments(MomentDistribution dist,
                                                        std::span<const MomentFunctional<Scalar>> functionals,
                                                        Index n, Index K, RngStream& rng) {
  if (K < 2 || n < 1) throw std::invalid_argument("monte_carlo_moments: need K >= 2 and n >= 1");
  for (const auto& f : functionals) {
    if (f.kind != MomentFunctional<Scalar>::Kind::norm_outer && f.a.size() != n) {
      throw std::invalid_argument("monte_carlo_moments: functional vector has wrong dimension");
    }
  }
  const std::size_t m = functionals.size();
  std::vector<Matrix<Scalar>> s1(m, Matrix<Scalar>::Zero(n, n));
  std::vector<Matrix<Scalar>> s2(m, Matrix<Scalar>::Zero(n, n));

  constexpr Index kBlock = 4096;
  Matrix<Scalar> block(kBlock, n);
  Matrix<Scalar> weights(kBlock, static_cast<Index>(m));
  Vector<Scalar> u(n);
  for (Index start = 0; start < K; start += kBlock) {
    const Index rows = std::min(kBlock, K - start);
    for (Index r = 0; r < rows; ++r) {
      for (Index j = 0; j < n; ++j) u[j] = static_cast<Scalar>(rng.normal());
      if (dist == MomentDistribution::sphere) {
        Scalar norm = u.norm();
        while (!(norm > Scalar(0))) {
          for (Index j = 0; j < n; ++j) u[j] = static_cast<Scalar>(rng.normal());
          norm = u.norm();
        }
        u /= norm;
      }
      block.row(r) = u.transpose();
      for (std::size_t f = 0; f < m; ++f) weights(r, static_cast<Index>(f)) = functionals[f].weight(u);
    }
    const auto U = block.topRows(rows);
    const Matrix<Scalar> U2 = U.array().square().matrix();
    for (std::size_t f = 0; f < m; ++f) {
      const auto w = weights.col(static_cast<Index>(f)).head(rows);
      const Matrix<Scalar> wU = U.array().colwise() * w.array();
      s1[f].noalias() += U.transpose() * wU;
      const Matrix<Scalar> w2U2 = U2.array().colwise() * w.array().square();
      s2[f].noalias() += U2.transpose() * w2U2;
    }
  }

  std::vector<MomentEstimate<Scalar>> out;
  out.reserve(m);
  const Scalar k = static_cast<Scalar>(K);
  for (std::size_t f = 0; f < m; ++f) {
    MomentEstimate<Scalar> est;
    est.samples = K;
    est.mean = s1[f] / k;
    const Matrix<Scalar> var =
        ((s2[f] / k - est.mean.array().square().matrix()) * (k / (k - Scalar(1)))).cwiseMax(Scalar(0));
    est.std_error = (var / k).cwiseSqrt();
    out.push_back(std::move(est));
  }
  return out;
}

template <typename Scalar = double>
MomentEstimate<Scalar> monte_carlo_moment(MomentDistribution dist, const MomentFunctional<Scalar>& functional,
                                          Index n, Index K, RngStream& rng) {
  return monte_carlo_moments<Scalar>(dist, std::span(&functional, 1), n, K, rng).front();
}

/// Closed forms for Gaussian and uniform-on-sphere u:
///   Gaussian: E[(a^T u)^2 u u^T] = a^T a I + 2 a a^T,
///             E[||u||^k u u^T]   = (n+2)(n+4)...(n+k) I        (k even),
///   sphere:   E[(a^T u)^2 u u^T] = (a^T a I + 2 a a^T) / (n (n+2)),
///             E[||u||^k u u^T]   = I / n,
/// and the odd functional has zero mean under both. Odd k for the Gaussian
/// norm functional has only the upper bound from `gaussian_odd_norm_bound`.
template <typename Scalar = double>
Matrix<Scalar> moment_closed_form(MomentDistribution dist, const MomentFunctional<Scalar>& f, Index n) {
  using Kind = typename MomentFunctional<Scalar>::Kind;
  const Matrix<Scalar> I = Matrix<Scalar>::Identity(n, n);
  const Scalar nn = static_cast<Scalar>(n);
  switch (f.kind) {
    case Kind::quad_outer: {
      Matrix<Scalar> m = f.a.squaredNorm() * I + Scalar(2) * f.a * f.a.transpose();
      return dist == MomentDistribution::gaussian ? m : Matrix<Scalar>(m / (nn * (nn + 2)));
    }
    case Kind::odd_outer: return Matrix<Scalar>::Zero(n, n);
    case Kind::norm_outer: {
      if (dist == MomentDistribution::sphere) return I / nn;
      if (f.k % 2 != 0) throw std::invalid_argument("odd k Gaussian norm moment has no closed form");
      Scalar c(1);
      for (int j = 2; j <= f.k; j += 2) c *= nn + static_cast<Scalar>(j);
      return c * I;
    }
  }
  return I;
}

/// (n+1)(n+3)...(n+k) n^{-1/2}, the upper bound on E[||u||^k u u^T] for odd k.
template <typename Scalar = double>
Scalar gaussian_odd_norm_bound(Index n, int k) {
  if (k % 2 == 0 || k < 1) throw std::invalid_argument("gaussian_odd_norm_bound: k must be odd");
  const Scalar nn = static_cast<Scalar>(n);
  Scalar c(1);
  for (int j = 1; j <= k; j += 2) c *= nn + static_cast<Scalar>(j);
  return c / std::sqrt(nn);
}

}  // namespace gradest
