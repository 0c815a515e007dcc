#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library under test except the plain prior container.

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "lassodiag/prior.hpp"

namespace oracle {

inline double pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
inline double cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// Integral of f(w) phi(w) over the real line, split at the given kinks.
inline double gaussian_expectation(const std::function<double(double)>& f, std::vector<double> kinks) {
  using boost::math::quadrature::gauss_kronrod;
  kinks.push_back(-40.0);
  kinks.push_back(40.0);
  std::sort(kinks.begin(), kinks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < kinks.size(); ++i) {
    const double a = std::clamp(kinks[i], -40.0, 40.0);
    const double b = std::clamp(kinks[i + 1], -40.0, 40.0);
    if (b <= a) continue;
    total += gauss_kronrod<double, 61>::integrate([&](double w) { return f(w) * pdf(w); }, a, b, 15, 1e-14);
  }
  return total;
}

// E (eta(mu + W; alpha) - mu)^2 with unit noise, by quadrature.
inline double risk(double mu, double alpha) {
  return gaussian_expectation([&](double w) { return std::pow(soft(mu + w, alpha) - mu, 2); },
                              {alpha - mu, -alpha - mu});
}

// E (eta(Pi + tau W; alpha tau) - Pi)^2.
inline double mse(const lassodiag::DiscretePrior& prior, double tau, double alpha) {
  double total = prior.zero_mass() * tau * tau * risk(0.0, alpha);
  for (const auto& a : prior.atoms()) total += a.weight * tau * tau * risk(a.value / tau, alpha);
  return total;
}

// P(|Pi + tau W| > alpha tau) by quadrature of the indicator.
inline double exceed(const lassodiag::DiscretePrior& prior, double tau, double alpha) {
  double total = 0.0;
  double mass = 0.0;
  for (const auto& a : prior.atoms()) {
    const double mu = a.value / tau;
    total += a.weight * gaussian_expectation([&](double w) { return std::abs(mu + w) > alpha ? 1.0 : 0.0; },
                                             {alpha - mu, -alpha - mu});
    mass += a.weight;
  }
  return total / mass;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Largest tau solving tau^2 = sigma^2 + mse / delta, by damped iteration from tau0.
inline double tau_fixed_point(double delta, const lassodiag::DiscretePrior& prior, double sigma, double alpha,
                              double tau0) {
  double s = tau0 * tau0;
  for (int i = 0; i < 200000; ++i) {
    const double tau = std::sqrt(s);
    const double next = sigma * sigma + mse(prior, tau, alpha) / delta;
    const double upd = 0.5 * s + 0.5 * next;
    if (std::abs(upd - s) <= 1e-15 * std::max(1.0, s)) return std::sqrt(upd);
    s = upd;
  }
  return std::sqrt(s);
}

// Lower-boundary quantities straight from the parametric pair in t.
inline double boundary_u(double t, double delta, double eps) {
  const double tail = (1 + t * t) * cdf(-t) - t * pdf(t);
  const double num = 2 * (1 - eps) * tail + eps * (1 + t * t) - delta;
  const double den = eps * ((1 + t * t) * (1 - 2 * cdf(-t)) + 2 * t * pdf(t));
  return 1.0 - (1 - 2 * cdf(-t)) * num / den;
}
inline double boundary_q(double t, double delta, double eps) {
  const double u = boundary_u(t, delta, eps);
  const double a = 2 * (1 - eps) * cdf(-t);
  return a / (a + eps * u);
}

// Largest epsilon for which min_t of the transition ratio stays at or below one,
// found by bisection in epsilon with a dense scan plus golden refinement in t.
inline double epsilon_star_direct(double delta) {
  auto min_ratio = [&](double eps) {
    auto g = [&](double t) {
      return (2 * (1 - eps) * ((1 + t * t) * cdf(-t) - t * pdf(t)) + eps * (1 + t * t)) / delta;
    };
    double best_t = 0.0, best = g(0.0);
    for (int i = 1; i <= 4000; ++i) {
      const double t = 10.0 * i / 4000;
      if (g(t) < best) best = g(t), best_t = t;
    }
    double a = std::max(0.0, best_t - 0.0025), b = best_t + 0.0025;
    const double r = 0.5 * (std::sqrt(5.0) - 1);
    for (int i = 0; i < 200; ++i) {
      const double c = b - r * (b - a), d = a + r * (b - a);
      if (g(c) < g(d)) b = d; else a = c;
    }
    return g(0.5 * (a + b));
  };
  return bisect([&](double eps) { return min_ratio(eps) - 1.0; }, 1e-9, 1.0 - 1e-9, 100);
}

// Proximal gradient with Nesterov momentum for 0.5||y - Xb||^2 + lambda||b||_1.
inline Eigen::VectorXd prox_gradient_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                                           int iterations) {
  const double L = Eigen::JacobiSVD<Eigen::MatrixXd>(X).singularValues()(0);
  const double step = 1.0 / (L * L);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(X.cols()), z = b, prev = b;
  double t = 1.0;
  for (int k = 0; k < iterations; ++k) {
    const Eigen::VectorXd g = X.transpose() * (X * z - y);
    prev = b;
    b = z - step * g;
    for (Eigen::Index j = 0; j < b.size(); ++j) b(j) = soft(b(j), step * lambda);
    const double tn = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
    z = b + ((t - 1) / tn) * (b - prev);
    t = tn;
  }
  return b;
}

inline double lasso_obj(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& b,
                        double lambda) {
  return 0.5 * (y - X * b).squaredNorm() + lambda * b.lpNorm<1>();
}

}  // namespace oracle
