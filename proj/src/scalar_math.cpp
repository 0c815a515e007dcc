#include "lassodiag/scalar_math.hpp"

#include <cmath>

#include "lassodiag/errors.hpp"

namespace lassodiag {
namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490392848359376884740;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684758586311649;

// Unchecked variants for internal use where arguments are already validated or
// may legitimately be infinite (e.g. mu / tau as tau -> 0).
double pdf(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }
double cdf(double t) { return 0.5 * std::erfc(-t * kInvSqrt2); }

}  // namespace

double normal_pdf(double t) {
  if (!std::isfinite(t)) throw DomainError("normal_pdf: non-finite argument");
  return pdf(t);
}

double normal_cdf(double t) {
  if (!std::isfinite(t)) throw DomainError("normal_cdf: non-finite argument");
  return cdf(t);
}

double soft_threshold(double x, double theta) {
  if (!(theta >= 0.0)) throw DomainError("soft_threshold: threshold must be nonnegative");
  if (x > theta) return x - theta;
  if (x < -theta) return x + theta;
  return 0.0;
}

double e_eta_sq_noise(double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("e_eta_sq_noise: alpha must be nonnegative");
  if (std::isinf(alpha)) return 0.0;
  return 2.0 * ((1.0 + alpha * alpha) * cdf(-alpha) - alpha * pdf(alpha));
}

double shrinkage_risk(double mu, double alpha) {
  // With X = mu + W the error eta(X) - mu is W - alpha above the threshold,
  // W + alpha below -alpha and -mu inside the dead zone. Each piece is a
  // truncated Gaussian second moment.
  const double m = std::abs(mu);
  const double a2 = 1.0 + alpha * alpha;
  if (std::isinf(m)) return a2;
  const double upper = a2 * cdf(m - alpha) - (alpha + m) * pdf(alpha - m);
  const double lower = a2 * cdf(-alpha - m) - (alpha - m) * pdf(alpha + m);
  const double dead = m * m * (cdf(alpha - m) - cdf(-alpha - m));
  return upper + lower + dead;
}

double e_shrinkage_mse(const DiscretePrior& prior, double tau, double alpha) {
  if (prior.empty()) throw DomainError("e_shrinkage_mse: empty prior");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("e_shrinkage_mse: tau must be positive");
  if (!(alpha > 0.0)) throw DomainError("e_shrinkage_mse: alpha must be positive");
  double risk = prior.zero_mass() * shrinkage_risk(0.0, alpha);
  for (const Atom& a : prior.atoms()) {
    risk += a.weight * shrinkage_risk(a.value / tau, alpha);
  }
  return tau * tau * risk;
}

double p_exceed(const DiscretePrior& prior_star, double tau, double alpha) {
  if (prior_star.empty()) throw DomainError("p_exceed: empty prior");
  if (prior_star.zero_mass() > 0.0) throw DomainError("p_exceed: conditional prior has mass at zero");
  if (!(tau > 0.0)) throw DomainError("p_exceed: tau must be positive");
  if (!(alpha > 0.0)) throw DomainError("p_exceed: alpha must be positive");
  double p = 0.0;
  for (const Atom& a : prior_star.atoms()) {
    const double mu = a.value / tau;
    p += a.weight * (cdf(-alpha + mu) + cdf(-alpha - mu));
  }
  return p;
}

}  // namespace lassodiag
