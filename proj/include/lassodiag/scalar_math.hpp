#pragma once

#include "lassodiag/prior.hpp"

namespace lassodiag {

/// Absolute accuracy targeted by the Gaussian special functions below.
inline constexpr double kSpecialFunctionTolerance = 1e-12;

/// Standard normal density. Throws DomainError for non-finite t.
double normal_pdf(double t);
/// Standard normal distribution function, evaluated through erfc so that the
/// lower tail keeps full relative precision.
double normal_cdf(double t);

/// sign(x) * max(|x| - theta, 0).
double soft_threshold(double x, double theta);

/// E[eta_alpha(W)^2] for W ~ N(0,1): 2[(1 + a^2) Phi(-a) - a phi(a)].
double e_eta_sq_noise(double alpha);

/// E[(eta_alpha(mu + W) - mu)^2] for a fixed location mu. Even in mu.
double shrinkage_risk(double mu, double alpha);

/// E[(eta_{alpha tau}(Pi + tau W) - Pi)^2], summed atom by atom over the prior
/// including its mass at zero.
double e_shrinkage_mse(const DiscretePrior& prior, double tau, double alpha);

/// P(|Pi* + tau W| > alpha tau) for a conditional prior (no mass at zero).
double p_exceed(const DiscretePrior& prior_star, double tau, double alpha);

}  // namespace lassodiag
