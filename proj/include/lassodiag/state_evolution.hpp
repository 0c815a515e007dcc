#pragma once

#include <optional>

#include "lassodiag/prior.hpp"

namespace lassodiag {

/// Asymptotic regime: delta = n/p (sampling ratio), epsilon = k/p (sparsity ratio).
class ProblemShape {
 public:
  /// Throws DomainError unless delta > 0 and 0 < epsilon < 1.
  ProblemShape(double delta, double epsilon);

  double delta() const noexcept { return delta_; }
  double epsilon() const noexcept { return epsilon_; }

 private:
  double delta_;
  double epsilon_;
};

/// Noise standard deviation; infinity is a distinguished value.
class NoiseLevel {
 public:
  explicit NoiseLevel(double sigma);
  static NoiseLevel infinite() noexcept;

  bool is_infinite() const noexcept { return infinite_; }
  /// Throws DomainError for the infinite level.
  double sigma() const;

 private:
  NoiseLevel() = default;
  double sigma_ = 0.0;
  bool infinite_ = false;
};

struct StateEvolutionPoint {
  double alpha = 0.0;   // normalized threshold
  double tau = 0.0;     // effective noise scale
  double lambda = 0.0;  // Lasso penalty
};

struct TauSolverOptions {
  double rel_tol = 1e-10;
  int max_iterations = 10000;
  /// Iterates below this value classify the regime as degenerate (tau -> 0).
  double degenerate_floor = 1e-8;
  /// Starting point; defaults to 10 (sigma + sqrt(E Pi^2) + 1).
  std::optional<double> tau_start;
};

struct TauFixedPoint {
  double tau = 0.0;
  bool degenerate = false;
  int iterations = 0;
};

/// Threshold below which the state evolution has no finite fixed point:
/// the root of (1 + t^2) Phi(-t) - t phi(t) = delta / 2, or 0 when delta >= 1.
double alpha0(const ProblemShape& shape);

/// Largest fixed point of tau -> sqrt(sigma^2 + E(eta_{alpha tau}(Pi + tau W) - Pi)^2 / delta).
///
/// The iteration runs on s = tau^2 from above, so every iterate stays above
/// the largest root; secant extrapolation on s -> H(s) - s accelerates the
/// slow linear phase and is accepted only when it lands on the same side of
/// the root. Oscillating plain steps are damped by 0.5. A collapse below the
/// degenerate floor is reported through TauFixedPoint::degenerate.
TauFixedPoint solve_tau_fixed_point(const ProblemShape& shape, const DiscretePrior& prior,
                                    const NoiseLevel& sigma, double alpha,
                                    const TauSolverOptions& options = {});

/// One evaluation of the calibration map alpha -> lambda.
struct Calibration {
  double alpha = 0.0;
  double tau = 0.0;
  double lambda = 0.0;
  bool degenerate = false;

  /// Usable grid points have a positive penalty and a nondegenerate tau.
  bool usable() const noexcept { return !degenerate && lambda > 0.0; }
};

/// lambda = (1 - P(|Pi + tau W| > alpha tau) / delta) alpha tau at the solved tau.
/// Degenerate solutions report tau = lambda = 0.
Calibration lambda_of_alpha(const ProblemShape& shape, const DiscretePrior& prior,
                            const NoiseLevel& sigma, double alpha);

/// Infimum of alpha values whose calibration is usable, located by bisection.
double usable_alpha_floor(const ProblemShape& shape, const DiscretePrior& prior,
                          const NoiseLevel& sigma);

/// Inverts lambda_of_alpha by bracketing and a TOMS 748 root solve.
/// `alpha_hint` seeds the bracket (warm start along a grid).
StateEvolutionPoint solve_alpha_of_lambda(const ProblemShape& shape, const DiscretePrior& prior,
                                          const NoiseLevel& sigma, double lambda,
                                          std::optional<double> alpha_hint = std::nullopt);

}  // namespace lassodiag
