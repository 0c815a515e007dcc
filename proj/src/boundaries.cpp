#include "lassodiag/boundaries.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <string>

#include "lassodiag/errors.hpp"
#include "lassodiag/scalar_math.hpp"

namespace lassodiag {
namespace {

constexpr double kScanTop = 30.0;
constexpr double kScanStep = 0.01;
constexpr double kScanBottom = 0.005;
constexpr double kUClamp = 1e-6;

template <class F>
double root_in(F&& f, double lo, double hi) {
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  std::uintmax_t max_iter = 300;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
  return 0.5 * (a + b);
}

// Maximizer of u(t) near a coarse sample.
std::pair<double, double> refine_peak(const ProblemShape& shape, double t_center, double half_width) {
  const double lo = std::max(1e-9, t_center - half_width);
  const double hi = t_center + half_width;
  std::uintmax_t max_iter = 200;
  const auto [t, neg_u] = boost::math::tools::brent_find_minima(
      [&](double t) { return -lower_boundary_u_of_t(t, shape); }, lo, hi, 52, max_iter);
  return {t, -neg_u};
}

double q_of_t(double t, double u, double epsilon) {
  const double tail = 2.0 * (1.0 - epsilon) * normal_cdf(-t);
  return tail / (tail + epsilon * u);
}

}  // namespace

double transition_delta_at(double t) {
  const double ph = normal_pdf(t);
  return 2.0 * ph / (2.0 * ph + t * (1.0 - 2.0 * normal_cdf(-t)));
}

double transition_epsilon_at(double t) {
  const double ph = normal_pdf(t);
  const double tail = normal_cdf(-t);
  return (2.0 * ph - 2.0 * t * tail) / (2.0 * ph + t * (1.0 - 2.0 * tail));
}

double transition_ratio(double t, const ProblemShape& shape) {
  const double eps = shape.epsilon();
  const double t2 = 1.0 + t * t;
  return (2.0 * (1.0 - eps) * (t2 * normal_cdf(-t) - t * normal_pdf(t)) + eps * t2) / shape.delta();
}

DtIdentityResiduals dt_identity_residuals(double delta, const DtTransition& dt, double epsilon) {
  const double t = dt.t_star;
  const double es = dt.epsilon_star;
  const double tail = normal_cdf(-t);
  const double ph = normal_pdf(t);
  DtIdentityResiduals r;
  r.transition_equation =
      std::abs(2.0 * (1.0 - es) * ((1.0 + t * t) * tail - t * ph) + es * (1.0 + t * t) - delta);
  r.density_ratio = std::abs(ph / t - delta / (2.0 * (1.0 - es)));
  r.tail_mass = std::abs(tail - (delta - es) / (2.0 * (1.0 - es)));
  if (!(epsilon > es && epsilon < 1.0)) {
    throw DomainError("dt_identity_residuals: epsilon must lie in (epsilon_star, 1)");
  }
  const ProblemShape shape(delta, epsilon);
  const double u_prime = 1.0 - (1.0 - delta) * (epsilon - es) / (epsilon * (1.0 - es));
  r.lower_boundary_root = std::abs(lower_boundary_u_of_t(t, shape) - u_prime);
  return r;
}

DtTransition epsilon_star(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("epsilon_star: delta must lie in (0, 1); delta >= 1 is always below the transition");
  }
  const double t = root_in([delta](double t) { return transition_delta_at(t) - delta; }, 1e-12, kScanTop);
  DtTransition dt;
  dt.t_star = t;
  dt.epsilon_star = transition_epsilon_at(t);
  dt.u_star = 1.0;
  const double tail = normal_cdf(-t);
  const double density_residual =
      std::abs(normal_pdf(t) / t - delta / (2.0 * (1.0 - dt.epsilon_star)));
  const double tail_residual =
      std::abs(tail - (delta - dt.epsilon_star) / (2.0 * (1.0 - dt.epsilon_star)));
  if (density_residual > 1e-8 || tail_residual > 1e-8) {
    throw SolverError("epsilon_star: transition identities not satisfied", dt.epsilon_star);
  }
  return dt;
}

std::optional<DtTransition> dt_transition(const ProblemShape& shape) {
  if (shape.delta() >= 1.0) return std::nullopt;
  DtTransition dt = epsilon_star(shape.delta());
  dt.u_star = u_star(shape);
  return dt;
}

double u_star(const ProblemShape& shape) {
  const double delta = shape.delta();
  const double eps = shape.epsilon();
  if (delta >= 1.0) return 1.0;
  const double es = epsilon_star(delta).epsilon_star;
  if (eps <= es) return 1.0;
  return 1.0 - (1.0 - delta) * (eps - es) / (eps * (1.0 - es));
}

double lower_boundary_u_of_t(double t, const ProblemShape& shape) {
  const double eps = shape.epsilon();
  const double delta = shape.delta();
  const double tail = normal_cdf(-t);
  const double ph = normal_pdf(t);
  const double central = 1.0 - 2.0 * tail;
  const double denom = eps * ((1.0 + t * t) * central + 2.0 * t * ph);
  // 1 - central * N / denom, rearranged so the eps (1 + t^2) terms cancel exactly.
  const double numer =
      2.0 * eps * t * ph + central * (delta - 2.0 * (1.0 - eps) * ((1.0 + t * t) * tail - t * ph));
  return numer / denom;
}

double t_star_extended(double u, const ProblemShape& shape) {
  if (!(u > 0.0) || !std::isfinite(u)) throw DomainError("t_star: u must be positive");
  auto gap = [&](double t) { return lower_boundary_u_of_t(t, shape) - u; };

  // Beyond the scan window the Gaussian tails vanish and u(t) ~ delta / (e (1 + t^2)),
  // which is monotone; small u puts the root there.
  if (gap(kScanTop) >= 0.0) {
    double t_far = std::max(2.0 * kScanTop, 2.0 * std::sqrt(shape.delta() / (shape.epsilon() * u) + 1.0));
    while (gap(t_far) >= 0.0) t_far *= 2.0;
    return root_in(gap, kScanTop, t_far);
  }

  double prev_t = kScanTop;
  double best_t = kScanTop;
  double best_gap = gap(kScanTop);
  for (int i = 1;; ++i) {
    const double t = kScanTop - i * kScanStep;
    if (t < kScanBottom) break;
    const double g = gap(t);
    if (g >= 0.0) return root_in(gap, t, prev_t);
    if (g > best_gap) {
      best_gap = g;
      best_t = t;
    }
    prev_t = t;
  }
  // No sampled crossing: the curve may still touch u between samples near its peak.
  const auto [t_peak, u_peak] = refine_peak(shape, best_t, kScanStep);
  if (u_peak >= u) return root_in(gap, t_peak, std::min(kScanTop, best_t + kScanStep));
  throw DomainError("t_star: no root for u = " + std::to_string(u) + " (above the power ceiling)");
}

double t_star(double u, const ProblemShape& shape) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("t_star: u must lie in (0, 1)");
  return t_star_extended(u, shape);
}

double q_star(double u, const ProblemShape& shape) {
  const double ceiling = u_star(shape);
  if (!(u >= 0.0) || u > ceiling + 1e-9) {
    throw DomainError("q_star: u = " + std::to_string(u) + " outside [0, " + std::to_string(ceiling) + "]");
  }
  if (ceiling < 1.0) {
    // Above the transition the root at the ceiling is the transition root itself.
    const double t_ceiling = epsilon_star(shape.delta()).t_star;
    if (u >= ceiling) return q_of_t(t_ceiling, ceiling, shape.epsilon());
    const double uc = std::max(u, kUClamp);
    try {
      return q_of_t(t_star_extended(uc, shape), uc, shape.epsilon());
    } catch (const DomainError&) {
      // Within rounding of the ceiling the double root is not resolvable.
      return q_of_t(t_ceiling, uc, shape.epsilon());
    }
  }
  const double uc = std::clamp(u, kUClamp, ceiling - kUClamp);
  return q_of_t(t_star_extended(uc, shape), uc, shape.epsilon());
}

double l1_value(const ProblemShape& shape) { return 1.0 - shape.epsilon(); }

double l2_value(double u, const ProblemShape& shape) {
  return 1.0 - shape.epsilon() / shape.delta() * u;
}

std::optional<double> l2_intersection(const ProblemShape& shape) {
  // Walk the branch of the curve that defines q* (from large t down to the
  // peak of u(t)) and look for q* reaching l2 while u < 1.
  auto u_of = [&](double t) { return lower_boundary_u_of_t(t, shape); };
  auto diff = [&](double t) {
    const double u = u_of(t);
    return q_of_t(t, u, shape.epsilon()) - l2_value(u, shape);
  };

  double best_t = kScanTop;
  double best_u = u_of(kScanTop);
  for (int i = 1;; ++i) {
    const double t = kScanTop - i * kScanStep;
    if (t < kScanBottom) break;
    const double u = u_of(t);
    if (u > best_u) {
      best_u = u;
      best_t = t;
    }
  }
  const auto [t_peak, u_peak] = refine_peak(shape, best_t, kScanStep);

  double prev_t = kScanTop;
  double prev_diff = diff(kScanTop);
  for (int i = 1;; ++i) {
    const double t = kScanTop - i * kScanStep;
    if (t <= t_peak) break;
    if (u_of(t) >= 1.0) return std::nullopt;
    const double d = diff(t);
    if (prev_diff < 0.0 && d >= 0.0) return u_of(root_in(diff, t, prev_t));
    prev_t = t;
    prev_diff = d;
  }
  if (u_peak < 1.0 && diff(t_peak) >= -1e-9) return u_peak;
  return std::nullopt;
}

BoundaryCurve sample_lower_boundary(const ProblemShape& shape, int n_samples) {
  if (n_samples < 2) throw DomainError("sample_lower_boundary: need at least two samples");
  const double ceiling = u_star(shape);
  BoundaryCurve curve{{}, shape};
  curve.samples.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const double u = ceiling * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    curve.samples.push_back({u, q_star(u, shape)});
  }
  return curve;
}

}  // namespace lassodiag
