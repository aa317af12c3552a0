#pragma once

#include "gradest/rng.hpp"
#include "gradest/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string_view>

namespace gradest {

enum class DirectionScheme { coordinate, orthonormal, general_interp, gaussian, sphere };

inline constexpr std::string_view to_string(DirectionScheme s) {
  switch (s) {
    case DirectionScheme::coordinate: return "coordinate";
    case DirectionScheme::orthonormal: return "orthonormal";
    case DirectionScheme::general_interp: return "general_interp";
    case DirectionScheme::gaussian: return "gaussian";
    case DirectionScheme::sphere: return "sphere";
  }
  return "?";
}

/// N sampling directions stored as the rows of an N x n matrix Q.
template <typename Scalar = double>
class DirectionSet {
 public:
  DirectionSet(Matrix<Scalar> rows, DirectionScheme scheme)
      : q_(std::move(rows)),
        scheme_(scheme),
        max_row_norm_(q_.rows() > 0 ? q_.rowwise().norm().maxCoeff() : Scalar(0)) {}

  const Matrix<Scalar>& matrix() const { return q_; }
  auto direction(Index i) const { return q_.row(i).transpose(); }
  Index dimension() const { return q_.cols(); }
  Index count() const { return q_.rows(); }
  DirectionScheme scheme() const { return scheme_; }
  Scalar max_row_norm() const { return max_row_norm_; }

 private:
  Matrix<Scalar> q_;
  DirectionScheme scheme_;
  Scalar max_row_norm_;
};

namespace detail {

inline void check_sizes(Index n, Index count) {
  if (n < 1 || count < 1) throw std::invalid_argument("direction set sizes must be positive");
}

template <typename Scalar, typename Row>
void fill_normal(Row&& row, RngStream& rng) {
  for (Index j = 0; j < row.size(); ++j) row[j] = static_cast<Scalar>(rng.normal());
}

}  // namespace detail

template <typename Scalar = double>
DirectionSet<Scalar> coordinate_directions(Index n) {
  detail::check_sizes(n, n);
  return {Matrix<Scalar>::Identity(n, n), DirectionScheme::coordinate};
}

/// N iid standard normal rows.
template <typename Scalar = double>
DirectionSet<Scalar> gaussian_directions(Index n, Index count, RngStream& rng) {
  detail::check_sizes(n, count);
  Matrix<Scalar> q(count, n);
  for (Index i = 0; i < count; ++i) detail::fill_normal<Scalar>(q.row(i), rng);
  return {std::move(q), DirectionScheme::gaussian};
}

/// N rows uniform on the unit sphere (normalized Gaussian draws).
template <typename Scalar = double>
DirectionSet<Scalar> sphere_directions(Index n, Index count, RngStream& rng) {
  detail::check_sizes(n, count);
  Matrix<Scalar> q(count, n);
  for (Index i = 0; i < count; ++i) {
    Scalar norm(0);
    do {
      detail::fill_normal<Scalar>(q.row(i), rng);
      norm = q.row(i).norm();
    } while (!(norm > Scalar(0)));
    q.row(i) /= norm;
  }
  return {std::move(q), DirectionScheme::sphere};
}

/// Haar-distributed n x n orthonormal rows: modified Gram-Schmidt with one
/// reorthogonalization pass over Gaussian rows. Row signs are left as
/// produced. A row that loses almost all of its norm to the projection is
/// redrawn.
template <typename Scalar = double>
DirectionSet<Scalar> orthonormal_directions(Index n, RngStream& rng) {
  detail::check_sizes(n, n);
  Matrix<Scalar> q(n, n);
  Vector<Scalar> v(n);
  for (Index i = 0; i < n; ++i) {
    for (;;) {
      detail::fill_normal<Scalar>(v, rng);
      const Scalar original = v.norm();
      for (int pass = 0; pass < 2; ++pass) {
        for (Index j = 0; j < i; ++j) v -= q.row(j).dot(v) * q.row(j).transpose();
      }
      const Scalar norm = v.norm();
      if (norm > Scalar(1e-8) * original) {
        q.row(i) = v.transpose() / norm;
        break;
      }
    }
  }
  return {std::move(q), DirectionScheme::orthonormal};
}

/// n Gaussian rows scaled by the largest row norm so that max ||u_i|| = 1.
template <typename Scalar = double>
DirectionSet<Scalar> interpolation_directions(Index n, RngStream& rng) {
  auto g = gaussian_directions<Scalar>(n, n, rng);
  Matrix<Scalar> q = g.matrix() / g.max_row_norm();
  return {std::move(q), DirectionScheme::general_interp};
}

/// ||Q^{-1}||_2 = 1 / sigma_min(Q) from a full SVD; infinite when singular.
template <typename Scalar>
Scalar inverse_spectral_norm(const Matrix<Scalar>& q) {
  if (q.rows() != q.cols()) throw std::invalid_argument("inverse_spectral_norm: Q must be square");
  Eigen::JacobiSVD<Matrix<Scalar>> svd(q);
  const Scalar smallest = svd.singularValues().minCoeff();
  return smallest > Scalar(0) ? Scalar(1) / smallest : std::numeric_limits<Scalar>::infinity();
}

}  // namespace gradest
