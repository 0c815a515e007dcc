#include "lassodiag/state_evolution.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "lassodiag/errors.hpp"
#include "lassodiag/scalar_math.hpp"

namespace lassodiag {
namespace {

constexpr double kAlphaCeiling = 1e6;

template <class F>
double toms748_root(F&& f, double lo, double hi, double f_lo, double f_hi) {
  std::uintmax_t max_iter = 300;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), max_iter);
  return 0.5 * (a + b);
}

}  // namespace

ProblemShape::ProblemShape(double delta, double epsilon) : delta_(delta), epsilon_(epsilon) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw DomainError("shape: delta must be a positive finite number, got " + std::to_string(delta));
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError("shape: epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
}

NoiseLevel::NoiseLevel(double sigma) : sigma_(sigma) {
  if (std::isinf(sigma) && sigma > 0.0) {
    infinite_ = true;
    sigma_ = 0.0;
    return;
  }
  if (!(sigma >= 0.0)) throw DomainError("noise level must be nonnegative");
}

NoiseLevel NoiseLevel::infinite() noexcept {
  NoiseLevel level;
  level.infinite_ = true;
  return level;
}

double NoiseLevel::sigma() const {
  if (infinite_) throw DomainError("noise level is infinite");
  return sigma_;
}

double alpha0(const ProblemShape& shape) {
  const double delta = shape.delta();
  if (delta >= 1.0) return 0.0;
  auto f = [delta](double t) { return 0.5 * e_eta_sq_noise(t) - 0.5 * delta; };
  const double hi = 40.0;
  return toms748_root(f, 0.0, hi, f(0.0), f(hi));
}

TauFixedPoint solve_tau_fixed_point(const ProblemShape& shape, const DiscretePrior& prior,
                                    const NoiseLevel& sigma, double alpha,
                                    const TauSolverOptions& options) {
  if (prior.empty()) throw DomainError("solve_tau_fixed_point: empty prior");
  // alpha > alpha0 is equivalent to E eta_alpha(W)^2 < delta.
  if (!(alpha > 0.0) || !(e_eta_sq_noise(alpha) < shape.delta())) {
    throw DomainError("solve_tau_fixed_point: alpha must exceed alpha0 = " +
                      std::to_string(alpha0(shape)));
  }
  const double sig = sigma.sigma();
  const double delta = shape.delta();
  const double floor_sq = options.degenerate_floor * options.degenerate_floor;

  auto map = [&](double s) { return sig * sig + e_shrinkage_mse(prior, std::sqrt(s), alpha) / delta; };
  auto gap = [&](double s) { return map(s) - s; };

  const double start =
      options.tau_start.value_or(10.0 * (sig + std::sqrt(prior.second_moment()) + 1.0));
  double s = start * start;
  double hs = gap(s);
  // Move above the largest fixed point before iterating downwards.
  while (hs > 0.0) {
    s *= 4.0;
    if (s > 1e300) throw SolverError("solve_tau_fixed_point: no finite fixed point", std::sqrt(s));
    hs = gap(s);
  }

  bool have_prev = false;
  double prev_s = 0.0;
  double prev_h = 0.0;
  double prev_step = 0.0;
  bool damped = false;

  for (int it = 1; it <= options.max_iterations; ++it) {
    double next = damped ? s + 0.5 * hs : s + hs;
    double h_next = 0.0;
    bool accepted = false;

    if (have_prev && hs != prev_h) {
      double secant = s - hs * (s - prev_s) / (hs - prev_h);
      if (std::isfinite(secant) && secant < next) {
        if (secant < floor_sq) secant = 0.25 * floor_sq;
        const double h_secant = gap(secant);
        if (h_secant <= 0.0) {
          next = secant;
          h_next = h_secant;
          accepted = true;
        } else if (secant >= floor_sq) {
          // The secant crossed the fixed point: [secant, s] brackets the largest root.
          const double root = toms748_root(gap, secant, s, h_secant, hs);
          const double tau = std::sqrt(root);
          return {tau, tau < options.degenerate_floor, it};
        }
      }
    }
    if (!accepted) {
      if (!(next > 0.0)) next = 0.25 * floor_sq;
      h_next = gap(next);
    }

    const double step = next - s;
    if (have_prev && !damped && step * prev_step < 0.0) damped = true;
    // Under linear convergence with rate r the remaining error is about step * r / (1 - r).
    const double rate = have_prev && prev_step != 0.0 ? step / prev_step : 0.0;
    const double amplify = rate > 0.0 && rate < 1.0 ? 1.0 / (1.0 - rate) : 1.0;

    const double tau_old = std::sqrt(s);
    const double tau_new = std::sqrt(next);
    prev_s = s;
    prev_h = hs;
    prev_step = step;
    have_prev = true;
    s = next;
    hs = h_next;

    if (tau_new < options.degenerate_floor) return {tau_new, true, it};
    if (amplify * std::abs(tau_new - tau_old) <= options.rel_tol * std::max(1.0, tau_old)) {
      return {tau_new, false, it};
    }
  }
  throw SolverError("solve_tau_fixed_point: no convergence within " +
                        std::to_string(options.max_iterations) + " iterations",
                    std::sqrt(s));
}

Calibration lambda_of_alpha(const ProblemShape& shape, const DiscretePrior& prior,
                            const NoiseLevel& sigma, double alpha) {
  const TauFixedPoint fp = solve_tau_fixed_point(shape, prior, sigma, alpha);
  Calibration c;
  c.alpha = alpha;
  if (fp.degenerate) {
    c.degenerate = true;
    return c;
  }
  c.tau = fp.tau;
  // P(|Pi + tau W| > alpha tau) over the full prior, zero atom included.
  double p_total = prior.zero_mass() * 2.0 * normal_cdf(-alpha);
  for (const Atom& a : prior.atoms()) {
    const double mu = a.value / fp.tau;
    p_total += a.weight * (normal_cdf(mu - alpha) + normal_cdf(-mu - alpha));
  }
  c.lambda = (1.0 - p_total / shape.delta()) * alpha * fp.tau;
  return c;
}

namespace {

bool is_usable(const ProblemShape& shape, const DiscretePrior& prior, const NoiseLevel& sigma,
               double alpha) {
  try {
    return lambda_of_alpha(shape, prior, sigma, alpha).usable();
  } catch (const SolverError&) {
    return false;
  }
}

}  // namespace

double usable_alpha_floor(const ProblemShape& shape, const DiscretePrior& prior,
                          const NoiseLevel& sigma) {
  const double a0 = alpha0(shape);
  double width = 1.0;
  while (!is_usable(shape, prior, sigma, a0 + width)) {
    width *= 2.0;
    if (a0 + width > kAlphaCeiling) {
      throw SolverError("usable_alpha_floor: no usable alpha below the ceiling", a0 + width);
    }
  }
  double lo = a0;
  double hi = a0 + width;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (is_usable(shape, prior, sigma, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

StateEvolutionPoint solve_alpha_of_lambda(const ProblemShape& shape, const DiscretePrior& prior,
                                          const NoiseLevel& sigma, double lambda,
                                          std::optional<double> alpha_hint) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("solve_alpha_of_lambda: lambda must be positive and finite");
  }
  const double a0 = alpha0(shape);

  // Unusable calibrations sit at the low end of the alpha range, so they are
  // mapped below the target to keep the bracket valid.
  auto excess = [&](double alpha) {
    try {
      const Calibration c = lambda_of_alpha(shape, prior, sigma, alpha);
      return (c.degenerate ? 0.0 : c.lambda) - lambda;
    } catch (const SolverError&) {
      return -lambda - 1.0;
    }
  };

  double start = alpha_hint.value_or(a0 + 1.0);
  if (!(start > a0)) start = a0 + 1.0;
  double lo, hi, f_lo, f_hi;
  const double f_start = excess(start);
  if (f_start >= 0.0) {
    hi = start;
    f_hi = f_start;
    lo = a0 + 0.5 * (start - a0);
    f_lo = excess(lo);
    while (f_lo >= 0.0) {
      hi = lo;
      f_hi = f_lo;
      lo = a0 + 0.5 * (lo - a0);
      if (lo - a0 < 1e-14 * std::max(1.0, a0)) {
        throw SolverError("solve_alpha_of_lambda: lambda below the representable range", lo);
      }
      f_lo = excess(lo);
    }
  } else {
    lo = start;
    f_lo = f_start;
    hi = a0 + 2.0 * (start - a0);
    f_hi = excess(hi);
    while (f_hi < 0.0) {
      lo = hi;
      f_lo = f_hi;
      hi = a0 + 2.0 * (hi - a0);
      if (hi > kAlphaCeiling) {
        throw SolverError("solve_alpha_of_lambda: no bracket below alpha = 1e6", hi);
      }
      f_hi = excess(hi);
    }
  }
  if (f_hi == 0.0) lo = hi;

  const double alpha = (lo == hi) ? hi : toms748_root(excess, lo, hi, f_lo, f_hi);
  const Calibration c = lambda_of_alpha(shape, prior, sigma, alpha);
  if (!c.usable() || std::abs(c.lambda - lambda) > 1e-9 * std::max(1.0, lambda)) {
    throw SolverError("solve_alpha_of_lambda: residual above tolerance", alpha);
  }
  return {c.alpha, c.tau, c.lambda};
}

}  // namespace lassodiag
