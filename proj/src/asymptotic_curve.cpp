#include "lassodiag/asymptotic_curve.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>

#include "lassodiag/boundaries.hpp"
#include "lassodiag/scalar_math.hpp"

namespace lassodiag {
namespace {

constexpr double kSparsityTolerance = 1e-9;
constexpr double kFdpAgreement = 1e-10;

void check_prior(const ProblemShape& shape, const DiscretePrior& prior) {
  if (prior.empty()) throw DomainError("asymptotic curve: empty prior");
  if (std::abs(prior.sparsity() - shape.epsilon()) > kSparsityTolerance) {
    throw DomainError("asymptotic curve: prior has P(nonzero) = " + std::to_string(prior.sparsity()) +
                      " but epsilon = " + std::to_string(shape.epsilon()));
  }
}

double false_mass(const ProblemShape& shape, double alpha) {
  return 2.0 * (1.0 - shape.epsilon()) * normal_cdf(-alpha);
}

double fdp_from_tpp(const ProblemShape& shape, double alpha, double tpp) {
  const double f = false_mass(shape, alpha);
  return f / (f + shape.epsilon() * tpp);
}

AsymptoticEvaluation degenerate_point(const ProblemShape& shape, double alpha) {
  AsymptoticEvaluation e;
  e.degenerate_limit = true;
  e.se = {alpha, 0.0, 0.0};
  e.point = {1.0, fdp_from_tpp(shape, alpha, 1.0)};
  return e;
}

AsymptoticEvaluation infinite_noise_point(const ProblemShape& shape, double alpha, double lambda_per_sigma) {
  AsymptoticEvaluation e;
  e.se = {alpha, std::numeric_limits<double>::infinity(), lambda_per_sigma};
  e.point = {2.0 * normal_cdf(-alpha), 1.0 - shape.epsilon()};
  return e;
}

AsymptoticEvaluation finite_point(const ProblemShape& shape, const DiscretePrior& prior,
                                  const StateEvolutionPoint& se) {
  const double tau = se.tau;
  const double alpha = se.alpha;
  const double tpp = p_exceed(prior.conditional(), tau, alpha);

  // fdp from the full prior: P(Pi = 0, selected) / P(selected).
  double selected = prior.zero_mass() * 2.0 * normal_cdf(-alpha);
  for (const Atom& a : prior.atoms()) {
    const double mu = a.value / tau;
    selected += a.weight * (normal_cdf(mu - alpha) + normal_cdf(-mu - alpha));
  }
  const double fdp_direct = prior.zero_mass() * 2.0 * normal_cdf(-alpha) / selected;
  const double fdp_identity = fdp_from_tpp(shape, alpha, tpp);
  if (!(std::abs(fdp_direct - fdp_identity) <= kFdpAgreement)) {
    throw SolverError("tpp_fdp_infinity: fdp evaluations disagree by " +
                          std::to_string(std::abs(fdp_direct - fdp_identity)),
                      alpha);
  }
  return {{tpp, fdp_identity}, se, false};
}

const DiscretePrior& unit_noise_prior() {
  static const DiscretePrior p = DiscretePrior::point_mass_at_zero();
  return p;
}

double alpha_floor(const ProblemShape& shape, const DiscretePrior& prior, const NoiseLevel& sigma) {
  if (sigma.is_infinite()) return usable_alpha_floor(shape, unit_noise_prior(), NoiseLevel(1.0));
  return usable_alpha_floor(shape, prior, sigma);
}

template <class F>
double toms748_root(F&& f, double lo, double hi, double f_lo, double f_hi) {
  std::uintmax_t max_iter = 300;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
  return 0.5 * (a + b);
}

}  // namespace

AsymptoticEvaluation evaluate_at_alpha(const ProblemShape& shape, const DiscretePrior& prior,
                                       const NoiseLevel& sigma, double alpha) {
  check_prior(shape, prior);
  if (sigma.is_infinite()) {
    const Calibration c = lambda_of_alpha(shape, unit_noise_prior(), NoiseLevel(1.0), alpha);
    return infinite_noise_point(shape, alpha, c.lambda);
  }
  const Calibration c = lambda_of_alpha(shape, prior, sigma, alpha);
  if (c.degenerate) return degenerate_point(shape, alpha);
  return finite_point(shape, prior, {c.alpha, c.tau, c.lambda});
}

AsymptoticEvaluation evaluate_at_lambda(const ProblemShape& shape, const DiscretePrior& prior,
                                        const NoiseLevel& sigma, double lambda,
                                        std::optional<double> alpha_hint) {
  check_prior(shape, prior);
  if (sigma.is_infinite()) {
    const StateEvolutionPoint se =
        solve_alpha_of_lambda(shape, unit_noise_prior(), NoiseLevel(1.0), lambda, alpha_hint);
    return infinite_noise_point(shape, se.alpha, se.lambda);
  }
  try {
    return finite_point(shape, prior, solve_alpha_of_lambda(shape, prior, sigma, lambda, alpha_hint));
  } catch (const SolverError&) {
    // Without noise a vanishing lambda can sit below the resolvable range of
    // the calibration; that is the tau -> 0 limit.
    if (sigma.sigma() > 0.0) throw;
    const double floor = usable_alpha_floor(shape, prior, sigma);
    const Calibration c = lambda_of_alpha(shape, prior, sigma, floor);
    if (lambda > c.lambda) throw;
    return degenerate_point(shape, floor);
  }
}

TradeoffPoint tpp_fdp_infinity(const ProblemShape& shape, const DiscretePrior& prior,
                               const NoiseLevel& sigma, double lambda) {
  return evaluate_at_lambda(shape, prior, sigma, lambda).point;
}

std::vector<double> LambdaGrid::values() const {
  if (!(lambda_min > 0.0 && lambda_min < lambda_max) || !std::isfinite(lambda_max)) {
    throw DomainError("lambda grid: need 0 < lambda_min < lambda_max");
  }
  if (n < 2) throw DomainError("lambda grid: need at least two points");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n - 1);
    out[static_cast<std::size_t>(i)] =
        log_spaced ? lambda_min * std::pow(lambda_max / lambda_min, f)
                   : lambda_min + f * (lambda_max - lambda_min);
  }
  out.back() = lambda_max;
  return out;
}

std::string_view to_string(LimitBranch b) noexcept {
  switch (b) {
    case LimitBranch::kFullPower:
      return "tpp=1";
    case LimitBranch::kL2:
      return "l2";
    case LimitBranch::kPolyline:
      return "polyline";
  }
  return "unknown";
}

EndpointLimits endpoint_limits(const ProblemShape& shape, const DiscretePrior& prior,
                               const NoiseLevel& sigma) {
  check_prior(shape, prior);
  EndpointLimits out;
  out.lambda_to_0 = evaluate_at_alpha(shape, prior, sigma, alpha_floor(shape, prior, sigma));

  const double delta = shape.delta();
  const TradeoffPoint& p0 = out.lambda_to_0.point;
  const double full_power_gap = std::abs(1.0 - p0.tpp);
  const double l2_gap = std::abs(shape.epsilon() / delta * p0.tpp + p0.fdp - 1.0);
  if (delta > 1.0) {
    out.branch = LimitBranch::kFullPower;
    out.branch_residual = full_power_gap;
  } else if (delta == 1.0 || shape.epsilon() >= epsilon_star(delta).epsilon_star) {
    out.branch = LimitBranch::kL2;
    out.branch_residual = l2_gap;
  } else {
    out.branch = LimitBranch::kPolyline;
    out.branch_residual = std::min(full_power_gap, l2_gap);
  }

  out.lambda_to_inf = evaluate_at_alpha(shape, prior, sigma, kAlphaCap);
  out.lambda_to_inf.point.tpp = 0.0;
  return out;
}

std::size_t AsymptoticPath::failed_count() const {
  return static_cast<std::size_t>(std::count_if(errors.begin(), errors.end(),
                                                [](const std::string& e) { return !e.empty(); }));
}

AsymptoticPath path(const ProblemShape& shape, const DiscretePrior& prior, const NoiseLevel& sigma,
                    const LambdaGrid& grid, bool with_endpoints) {
  check_prior(shape, prior);
  AsymptoticPath out{shape, prior, sigma, grid.values(), {}, {}, {}, std::nullopt};
  const std::size_t n = out.grid.size();
  out.points.resize(n);
  out.se_points.resize(n);
  out.errors.resize(n);
  std::optional<double> hint;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      const AsymptoticEvaluation e = evaluate_at_lambda(shape, prior, sigma, out.grid[i], hint);
      out.points[i] = e.point;
      out.se_points[i] = e.se;
      if (!e.degenerate_limit) hint = e.se.alpha;
    } catch (const std::exception& ex) {
      out.errors[i] = ex.what();
      if (out.errors[i].empty()) out.errors[i] = "unknown error";
    }
  }
  if (with_endpoints) out.endpoints = endpoint_limits(shape, prior, sigma);
  return out;
}

std::vector<Atom> HeterogeneousFamily::conditional_atoms() const {
  if (m < 1) throw DomainError("heterogeneous family: m must be at least 1");
  if (!(base > 0.0) || !(ratio > 1.0)) throw DomainError("heterogeneous family: need base > 0 and ratio > 1");
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(m));
  double v = base;
  for (int i = 0; i < m; ++i, v *= ratio) atoms.push_back({v, 1.0 / m});
  return atoms;
}

DiscretePrior HeterogeneousFamily::prior(double epsilon) const {
  return DiscretePrior::from_conditional(conditional_atoms(), epsilon);
}

namespace {

struct PathCut {
  bool reaches = false;  // the path attains the target tpp
  double alpha = 0.0;
  TradeoffPoint point;
};

// Point of the sigma-path whose tpp equals target_tpp; tpp decreases in alpha.
PathCut cut_at_tpp(const ProblemShape& shape, const DiscretePrior& prior, double sigma, double target_tpp) {
  const NoiseLevel noise(sigma);
  const double lo = usable_alpha_floor(shape, prior, noise);
  const AsymptoticEvaluation at_lo = evaluate_at_alpha(shape, prior, noise, lo);
  PathCut cut;
  cut.alpha = lo;
  cut.point = at_lo.point;
  if (at_lo.point.tpp < target_tpp) return cut;

  const double hi = kAlphaCap;
  auto gap = [&](double a) { return evaluate_at_alpha(shape, prior, noise, a).point.tpp - target_tpp; };
  const double g_lo = at_lo.point.tpp - target_tpp;
  const double g_hi = gap(hi);
  double alpha = lo;
  if (g_lo > 0.0) alpha = g_hi >= 0.0 ? hi : toms748_root(gap, lo, hi, g_lo, g_hi);
  cut.reaches = true;
  cut.alpha = alpha;
  cut.point = evaluate_at_alpha(shape, prior, noise, alpha).point;
  return cut;
}

double distance(const TradeoffPoint& a, const TradeoffPoint& b) {
  return std::hypot(a.tpp - b.tpp, a.fdp - b.fdp);
}

}  // namespace

AchievedParameters achieve_point(const TradeoffPoint& target, const ProblemShape& shape, double tol) {
  if (!(tol > 0.0)) throw DomainError("achieve_point: tol must be positive");
  if (!contains(target, shape, 0.0)) {
    throw InfeasibleTarget("achieve_point: target (" + std::to_string(target.tpp) + ", " +
                           std::to_string(target.fdp) + ") lies outside the feasible region");
  }
  const HeterogeneousFamily family{8};
  const DiscretePrior prior = family.prior(shape.epsilon());

  double best_dist = std::numeric_limits<double>::infinity();
  PathCut best_cut;
  double best_sigma = 0.0;
  auto probe = [&](double sigma) {
    const PathCut cut = cut_at_tpp(shape, prior, sigma, target.tpp);
    const double d = distance(cut.point, target);
    if (d < best_dist) {
      best_dist = d;
      best_cut = cut;
      best_sigma = sigma;
    }
    return cut;
  };
  // Paths that stop short of the target tpp are treated as lying above it.
  auto above = [&](const PathCut& c) { return !c.reaches || c.point.fdp >= target.fdp; };
  auto finish = [&]() {
    const NoiseLevel noise(best_sigma);
    const Calibration c = lambda_of_alpha(shape, prior, noise, best_cut.alpha);
    return AchievedParameters{prior, best_sigma, c.lambda, best_cut.alpha, best_cut.point};
  };

  // Keep refining past tol so the returned point is not merely on the edge of it.
  const double aim = 0.1 * tol;
  const double sigma_min = 1e-6 * family.base;
  const PathCut low = probe(sigma_min);
  if (best_dist <= aim) return finish();
  if (above(low)) {
    if (best_dist <= tol) return finish();
    throw SearchExhausted("achieve_point: target lies below the smallest-noise path", best_cut.point,
                          best_sigma, best_cut.alpha);
  }

  double lo = std::log(sigma_min);
  double hi = std::log(family.base);
  while (!above(probe(std::exp(hi)))) {
    if (best_dist <= aim) return finish();
    lo = hi;
    hi += std::log(10.0);
    if (hi > std::log(1e12)) {
      if (best_dist <= tol) return finish();
      throw SearchExhausted("achieve_point: no noise level lifts the path to the target", best_cut.point,
                            best_sigma, best_cut.alpha);
    }
  }
  for (int i = 0; i < 200 && best_dist > aim; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (above(probe(std::exp(mid)))) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo < 1e-13) break;
  }
  if (best_dist <= tol) return finish();
  throw SearchExhausted("achieve_point: closest point is " + std::to_string(best_dist) + " from the target",
                        best_cut.point, best_sigma, best_cut.alpha);
}

}  // namespace lassodiag
