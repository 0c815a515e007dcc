#pragma once

#include <stdexcept>
#include <string>

namespace lassodiag {

/// Input outside the domain of an operation (non-finite values, invalid shapes,
/// priors that violate their invariants).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative solver stopped without meeting its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_iterate)
      : std::runtime_error(what), last_iterate_(last_iterate) {}

  double last_iterate() const noexcept { return last_iterate_; }

 private:
  double last_iterate_;
};

/// A requested tradeoff point lies outside the feasible region.
class InfeasibleTarget : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace lassodiag
