#pragma once

#include "gradest/noise.hpp"
#include "gradest/objective.hpp"
#include "gradest/rng.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <type_traits>

namespace gradest {

/// Noisy evaluation oracle f(x) = phi(x) + eps(x) with an evaluation counter.
///
/// The counter is not synchronized. Parallel code clones one oracle per
/// worker and merges the counts when the workers join.
template <typename Scalar = double>
class NoisyOracle {
 public:
  using VectorType = Vector<Scalar>;

  NoisyOracle(ObjectiveFunction<Scalar> objective, NoiseModel<Scalar> noise = {})
      : objective_(std::make_shared<const ObjectiveFunction<Scalar>>(std::move(objective))),
        noise_(noise),
        noise_rng_(noise.seed, 0) {}

  Scalar operator()(const VectorType& x) { return evaluate(x); }

  Scalar evaluate(const VectorType& x) {
    objective_->check_dimension(x);
    ++eval_count_;
    const Scalar phi = objective_->value(x);
    if (noise_.kind == NoiseKind::none) return phi;
    Scalar f = phi + noise_.sample(x, noise_rng_);
    // Keep |f - phi| <= level in floating point, not just in exact arithmetic.
    while (std::abs(f - phi) > noise_.level) f = std::nextafter(f, phi);
    return f;
  }

  /// Noise-free value and gradient; these do not touch the counter.
  Scalar true_value(const VectorType& x) const { return objective_->value_at(x); }
  VectorType true_gradient(const VectorType& x) const { return objective_->gradient_at(x); }

  Index dimension() const { return objective_->n; }
  std::uint64_t eval_count() const { return eval_count_; }
  const ObjectiveFunction<Scalar>& objective() const { return *objective_; }
  const NoiseModel<Scalar>& noise() const { return noise_; }

  /// Independent copy for worker `worker`: shares the objective, starts
  /// its counter at zero and draws noise from its own substream.
  NoisyOracle clone(std::uint64_t worker) const {
    NoisyOracle copy(*this);
    copy.eval_count_ = 0;
    copy.noise_rng_ = RngStream(noise_.seed, 0).substream(worker + 1);
    return copy;
  }

  void merge_count(const NoisyOracle& worker) { eval_count_ += worker.eval_count_; }
  void reset_count() { eval_count_ = 0; }

 private:
  std::shared_ptr<const ObjectiveFunction<Scalar>> objective_;
  NoiseModel<Scalar> noise_;
  RngStream noise_rng_;
  std::uint64_t eval_count_ = 0;
};

template <typename Scalar>
Scalar eval_noisy(NoisyOracle<Scalar>& oracle, const std::type_identity_t<Vector<Scalar>>& x) {
  return oracle.evaluate(x);
}

}  // namespace gradest
