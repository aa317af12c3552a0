#pragma once

#include <stdexcept>
#include <string>

namespace gradest {

/// Interpolation directions are singular or too ill-conditioned to solve.
class SingularDirections : public std::runtime_error {
 public:
  SingularDirections(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Relative error requested against a zero reference gradient.
class ZeroGradient : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Line search called with a direction that is not a descent direction.
class NotDescent : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Backtracking exhausted without satisfying the sufficient decrease test.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, int backtracks) : std::runtime_error(what), backtracks_(backtracks) {}
  int backtracks() const noexcept { return backtracks_; }

 private:
  int backtracks_;
};

}  // namespace gradest
