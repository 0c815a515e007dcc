#include "lassodiag/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lassodiag/errors.hpp"

namespace lassodiag {

DiscretePrior::DiscretePrior(std::vector<Atom> atoms, double zero_mass)
    : atoms_(std::move(atoms)), zero_mass_(zero_mass) {
  if (!std::isfinite(zero_mass_) || zero_mass_ < 0.0 || zero_mass_ > 1.0) {
    throw DomainError("prior: zero_mass must lie in [0, 1], got " + std::to_string(zero_mass_));
  }
  double total = zero_mass_;
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.value) || a.value == 0.0) {
      throw DomainError("prior: atom values must be finite and nonzero (use zero_mass for 0)");
    }
    if (!std::isfinite(a.weight) || a.weight < 0.0) {
      throw DomainError("prior: atom weights must be finite and nonnegative");
    }
    total += a.weight;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw DomainError("prior: total mass must equal 1, got " + std::to_string(total));
  }
  if (zero_mass_ < 1.0 && atoms_.empty()) {
    throw DomainError("prior: nonzero mass requires at least one atom");
  }
}

DiscretePrior DiscretePrior::from_conditional(std::vector<Atom> conditional, double sparsity) {
  if (!(sparsity > 0.0 && sparsity <= 1.0)) {
    throw DomainError("prior: sparsity must lie in (0, 1]");
  }
  double total = 0.0;
  for (const Atom& a : conditional) {
    if (!std::isfinite(a.weight) || a.weight < 0.0) {
      throw DomainError("prior: atom weights must be finite and nonnegative");
    }
    total += a.weight;
  }
  if (!(total > 0.0)) {
    throw DomainError("prior: conditional weights must have positive total");
  }
  for (Atom& a : conditional) {
    a.weight = sparsity * a.weight / total;
  }
  if (sparsity == 1.0) return DiscretePrior(std::move(conditional), 0.0);
  // Recompute the zero mass from the rounded weights so the total is exact.
  double nonzero = 0.0;
  for (const Atom& a : conditional) nonzero += a.weight;
  return DiscretePrior(std::move(conditional), std::max(0.0, 1.0 - nonzero));
}

DiscretePrior DiscretePrior::point_mass_at_zero() { return DiscretePrior({}, 1.0); }

DiscretePrior DiscretePrior::conditional() const {
  if (empty() || zero_mass_ >= 1.0) {
    throw DomainError("prior: conditional distribution undefined without nonzero mass");
  }
  return from_conditional(atoms_, 1.0);
}

double DiscretePrior::second_moment() const noexcept {
  double m2 = 0.0;
  for (const Atom& a : atoms_) m2 += a.weight * a.value * a.value;
  return m2;
}

double DiscretePrior::max_abs_value() const noexcept {
  double m = 0.0;
  for (const Atom& a : atoms_) m = std::max(m, std::abs(a.value));
  return m;
}

double DiscretePrior::min_abs_value() const noexcept {
  double m = std::numeric_limits<double>::infinity();
  for (const Atom& a : atoms_) m = std::min(m, std::abs(a.value));
  return atoms_.empty() ? 0.0 : m;
}

}  // namespace lassodiag
