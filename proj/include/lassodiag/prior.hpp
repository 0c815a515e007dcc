#pragma once

#include <span>
#include <vector>

namespace lassodiag {

/// One nonzero support point of a discrete effect-size distribution.
struct Atom {
  double value = 0.0;
  double weight = 0.0;
};

/// Finite mixture  zero_mass * delta_0 + sum_i weight_i * delta_{value_i}.
///
/// Atoms never sit at zero; all mass at zero is carried by zero_mass. The
/// conditional distribution given a nonzero draw is obtained with conditional().
/// A default-constructed prior is empty and is rejected by every expectation.
class DiscretePrior {
 public:
  static constexpr double kMassTolerance = 1e-12;

  DiscretePrior() = default;

  /// Throws DomainError unless weights are nonnegative, values finite and
  /// nonzero, zero_mass in [0, 1] and the total mass is one.
  DiscretePrior(std::vector<Atom> atoms, double zero_mass);

  /// Builds (1 - sparsity) delta_0 + sparsity * conditional. Conditional weights
  /// are renormalized, so any positive weights are accepted.
  static DiscretePrior from_conditional(std::vector<Atom> conditional, double sparsity);

  static DiscretePrior point_mass_at_zero();

  bool empty() const noexcept { return atoms_.empty() && zero_mass_ == 0.0; }
  double zero_mass() const noexcept { return zero_mass_; }
  /// P(value != 0).
  double sparsity() const noexcept { return 1.0 - zero_mass_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }

  /// True when there is no mass at zero.
  bool is_conditional() const noexcept { return !empty() && zero_mass_ == 0.0; }

  /// Distribution of the value given that it is nonzero.
  DiscretePrior conditional() const;

  double second_moment() const noexcept;
  double max_abs_value() const noexcept;
  double min_abs_value() const noexcept;

 private:
  std::vector<Atom> atoms_;
  double zero_mass_ = 0.0;
};

}  // namespace lassodiag
