#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lassodiag/errors.hpp"
#include "lassodiag/region.hpp"
#include "lassodiag/state_evolution.hpp"

namespace lassodiag {

/// Largest threshold evaluated; Phi(-37) is still above 1e-300.
inline constexpr double kAlphaCap = 37.0;

/// One point of the limiting tradeoff curve together with its state evolution solution.
struct AsymptoticEvaluation {
  TradeoffPoint point;
  StateEvolutionPoint se;
  /// tau -> 0 regime: reported as the tpp = 1 limit point at the usable alpha floor.
  bool degenerate_limit = false;
};

/// Evaluates (tpp, fdp) at a given normalized threshold alpha.
///
/// For the infinite noise level the problem is solved with a point mass at
/// zero and unit noise, so se.lambda is the penalty per unit sigma and se.tau
/// is infinite; fdp is then exactly 1 - epsilon and tpp = 2 Phi(-alpha).
/// The prior must have P(nonzero) equal to shape.epsilon() within 1e-9.
AsymptoticEvaluation evaluate_at_alpha(const ProblemShape& shape, const DiscretePrior& prior,
                                       const NoiseLevel& sigma, double alpha);

/// Same at a penalty lambda; `alpha_hint` warm-starts the calibration inversion.
AsymptoticEvaluation evaluate_at_lambda(const ProblemShape& shape, const DiscretePrior& prior,
                                        const NoiseLevel& sigma, double lambda,
                                        std::optional<double> alpha_hint = std::nullopt);

/// tpp = P(|Pi* + tau W| > alpha tau) and
/// fdp = 2(1-e)Phi(-alpha) / (2(1-e)Phi(-alpha) + e tpp).
/// fdp is computed both from the full prior and from tpp; a disagreement
/// above 1e-10 raises SolverError.
TradeoffPoint tpp_fdp_infinity(const ProblemShape& shape, const DiscretePrior& prior,
                               const NoiseLevel& sigma, double lambda);

struct LambdaGrid {
  double lambda_min = 0.01;
  double lambda_max = 10.0;
  int n = 50;
  bool log_spaced = true;

  /// Ascending grid values. Throws DomainError unless 0 < lambda_min < lambda_max and n >= 2.
  std::vector<double> values() const;
};

/// Where the lambda -> 0 endpoint is expected to land.
enum class LimitBranch {
  kFullPower,  // tpp = 1 (delta > 1)
  kL2,         // (e / delta) tpp + fdp = 1 (delta <= 1, e >= e*)
  kPolyline,   // union of the two (delta <= 1, e < e*)
};

std::string_view to_string(LimitBranch b) noexcept;

struct EndpointLimits {
  AsymptoticEvaluation lambda_to_0;
  LimitBranch branch = LimitBranch::kFullPower;
  /// Distance of lambda_to_0 from its branch (for the polyline, from the nearer piece).
  double branch_residual = 0.0;
  /// tpp is reported as 0; fdp is the ratio at alpha = kAlphaCap.
  AsymptoticEvaluation lambda_to_inf;
};

EndpointLimits endpoint_limits(const ProblemShape& shape, const DiscretePrior& prior,
                               const NoiseLevel& sigma);

struct AsymptoticPath {
  ProblemShape shape;
  DiscretePrior prior;
  NoiseLevel sigma;
  std::vector<double> grid;
  std::vector<TradeoffPoint> points;
  std::vector<StateEvolutionPoint> se_points;
  /// Empty on success, otherwise the solver message for that grid point.
  std::vector<std::string> errors;
  std::optional<EndpointLimits> endpoints;

  bool ok(std::size_t i) const { return errors[i].empty(); }
  std::size_t failed_count() const;
};

/// Evaluates the curve on the grid, warm-starting each alpha bracket from the
/// previous grid point. Failed points are recorded, not thrown.
AsymptoticPath path(const ProblemShape& shape, const DiscretePrior& prior, const NoiseLevel& sigma,
                    const LambdaGrid& grid, bool with_endpoints = true);

/// m positive atoms base, base*ratio, ..., base*ratio^(m-1) with equal weights.
struct HeterogeneousFamily {
  int m = 1;
  double base = 0.01;
  double ratio = 10.0;

  std::vector<Atom> conditional_atoms() const;
  /// (1 - epsilon) delta_0 + epsilon * ladder.
  DiscretePrior prior(double epsilon) const;
};

struct AchievedParameters {
  DiscretePrior prior;
  double sigma = 0.0;
  double lambda = 0.0;
  double alpha = 0.0;
  TradeoffPoint achieved;
};

/// Raised when the search cannot meet the tolerance; carries the closest point seen.
class SearchExhausted : public SolverError {
 public:
  SearchExhausted(const std::string& what, TradeoffPoint closest, double sigma, double alpha)
      : SolverError(what, sigma), closest_(closest), sigma_(sigma), alpha_(alpha) {}

  TradeoffPoint closest() const noexcept { return closest_; }
  double sigma() const noexcept { return sigma_; }
  double alpha() const noexcept { return alpha_; }

 private:
  TradeoffPoint closest_;
  double sigma_;
  double alpha_;
};

/// Finds (sigma, lambda) with prior HeterogeneousFamily{8}.prior(epsilon) such that the
/// limiting curve passes within `tol` (Euclidean) of `target`.
///
/// Along each path alpha is root-found so that tpp matches the target; fdp at
/// that tpp is then bisected over log sigma. Paths that never reach the
/// target tpp count as lying above it. Throws InfeasibleTarget when the target
/// is outside the region and SearchExhausted when no parameters meet `tol`.
AchievedParameters achieve_point(const TradeoffPoint& target, const ProblemShape& shape, double tol);

}  // namespace lassodiag
