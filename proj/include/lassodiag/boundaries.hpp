#pragma once

#include <optional>
#include <vector>

#include "lassodiag/state_evolution.hpp"

namespace lassodiag {

/// Donoho-Tanner transition for a sampling ratio delta < 1.
struct DtTransition {
  double epsilon_star = 0.0;
  /// Positive double root of 2(1-e)[(1+t^2)Phi(-t) - t phi(t)] + e(1+t^2) = delta at e = epsilon_star.
  double t_star = 0.0;
  /// Power ceiling for the shape this transition was computed for (1 below the transition).
  double u_star = 1.0;
};

/// Residuals of the identities satisfied at the transition root.
struct DtIdentityResiduals {
  double transition_equation = 0.0;  // |LHS - delta| of the transition equation at t_star
  double density_ratio = 0.0;        // |phi(t*)/t* - delta / (2(1 - e*))|
  double tail_mass = 0.0;            // |Phi(-t*) - (delta - e*) / (2(1 - e*))|
  double lower_boundary_root = 0.0;  // lower-boundary equation evaluated at (t*, u')
};

struct BoundarySample {
  double u = 0.0;  // tpp
  double q = 0.0;  // lower-boundary fdp
};

/// Samples of the lower boundary q*(u), u ascending.
struct BoundaryCurve {
  std::vector<BoundarySample> samples;
  ProblemShape shape;
};

/// Solves for the transition through the parametric pair
///   delta = 2 phi(t) / (2 phi(t) + t (1 - 2 Phi(-t))),
///   e*    = (2 phi(t) - 2 t Phi(-t)) / (2 phi(t) + t (1 - 2 Phi(-t))).
/// Throws DomainError for delta >= 1 (no transition: always below it).
DtTransition epsilon_star(double delta);

/// Transition data with u_star filled for the given shape; nullopt when delta >= 1.
std::optional<DtTransition> dt_transition(const ProblemShape& shape);

/// Parametric delta(t) and epsilon*(t) of the transition curve.
double transition_delta_at(double t);
double transition_epsilon_at(double t);

/// [2(1-e)((1+t^2)Phi(-t) - t phi(t)) + e(1+t^2)] / delta. Above the
/// transition its infimum over t > 0 exceeds one.
double transition_ratio(double t, const ProblemShape& shape);

/// Identity residuals at the transition; `epsilon` selects u' for the last
/// residual and must exceed epsilon_star.
DtIdentityResiduals dt_identity_residuals(double delta, const DtTransition& dt, double epsilon);

/// Maximum achievable power: 1 when delta >= 1 or epsilon <= epsilon*(delta).
double u_star(const ProblemShape& shape);

/// u at which the lower-boundary equation has root t, i.e.
/// u(t) = 1 - (1 - 2 Phi(-t)) * N(t) / (e [(1+t^2)(1 - 2Phi(-t)) + 2 t phi(t)])
/// with N(t) = 2(1-e)[(1+t^2)Phi(-t) - t phi(t)] + e(1+t^2) - delta.
double lower_boundary_u_of_t(double t, const ProblemShape& shape);

/// Largest positive root of the lower-boundary equation for 0 < u < 1.
/// Throws DomainError when no root exists (u above the power ceiling).
double t_star(double u, const ProblemShape& shape);

/// Same root search without the u < 1 restriction (the curve extended to u > 0).
double t_star_extended(double u, const ProblemShape& shape);

/// Lower boundary q*(u) = 2(1-e)Phi(-t*) / (2(1-e)Phi(-t*) + e u).
/// Accepts u in [0, u_star]. u is clamped to at least 1e-6; below the
/// transition the top end is clamped to 1 - 1e-6, above it the value at
/// u_star is taken from the transition root, where q* meets l2.
double q_star(double u, const ProblemShape& shape);

/// fdp = 1 - epsilon.
double l1_value(const ProblemShape& shape);
/// fdp = 1 - (epsilon / delta) u.
double l2_value(double u, const ProblemShape& shape);

/// First u in (0, 1) where q* meets l2, if any.
std::optional<double> l2_intersection(const ProblemShape& shape);

/// q* on n_samples points spanning [0, u_star].
BoundaryCurve sample_lower_boundary(const ProblemShape& shape, int n_samples);

}  // namespace lassodiag
