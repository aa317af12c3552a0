#pragma once

#include "gradest/types.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gradest {

/// Last m curvature pairs (s, y) for the L-BFGS two-loop recursion.
///
/// Pairs with s^T y <= 1e-10 ||s|| ||y|| are rejected on insertion, so every
/// stored pair has s^T y > 0 and the implied inverse Hessian is positive
/// definite.
template <typename Scalar = double>
class LbfgsHistory {
 public:
  static constexpr double kCurvatureTolerance = 1e-10;

  explicit LbfgsHistory(int memory = 10) : memory_(memory) {
    if (memory < 1) throw std::invalid_argument("L-BFGS memory must be positive");
  }

  /// Stores (s, y) if it passes the curvature test; returns whether it did.
  bool push(const Vector<Scalar>& s, const Vector<Scalar>& y) {
    const Scalar sy = s.dot(y);
    if (!(sy > static_cast<Scalar>(kCurvatureTolerance) * s.norm() * y.norm())) return false;
    if (static_cast<int>(pairs_.size()) == memory_) pairs_.pop_front();
    pairs_.push_back({s, y, Scalar(1) / sy});
    return true;
  }

  void clear() { pairs_.clear(); }
  int size() const { return static_cast<int>(pairs_.size()); }
  int memory() const { return memory_; }

  /// d = -H g by the two-loop recursion with H0 = (s^T y / y^T y) I from
  /// the newest pair; d = -g when empty.
  Vector<Scalar> direction(const Vector<Scalar>& g) const {
    Vector<Scalar> q = g;
    std::vector<Scalar> alpha(pairs_.size());
    for (std::size_t i = pairs_.size(); i-- > 0;) {
      const auto& p = pairs_[i];
      alpha[i] = p.rho * p.s.dot(q);
      q -= alpha[i] * p.y;
    }
    if (!pairs_.empty()) {
      const auto& last = pairs_.back();
      q *= Scalar(1) / (last.rho * last.y.squaredNorm());
    }
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      const auto& p = pairs_[i];
      const Scalar beta = p.rho * p.y.dot(q);
      q += (alpha[i] - beta) * p.s;
    }
    return -q;
  }

 private:
  struct Pair {
    Vector<Scalar> s;
    Vector<Scalar> y;
    Scalar rho;
  };

  int memory_;
  std::deque<Pair> pairs_;
};

template <typename Scalar>
Vector<Scalar> lbfgs_direction(const LbfgsHistory<Scalar>& history, const Vector<Scalar>& g) {
  return history.direction(g);
}

}  // namespace gradest
