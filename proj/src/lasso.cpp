#include "lassodiag/lasso.hpp"

#include <algorithm>
#include <cmath>

namespace lassodiag {
namespace {

double soft(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Products of the design reused across coordinate resets and along a path.
struct DesignCache {
  Eigen::VectorXd col_sq;
  Eigen::VectorXd xty;
  Eigen::MatrixXd gram;  // empty in residual mode

  DesignCache(const DesignProblem& problem, bool use_gram)
      : col_sq(problem.X().colwise().squaredNorm().transpose()), xty(problem.X().transpose() * problem.y()) {
    if (use_gram) gram = problem.X().transpose() * problem.X();
  }
  bool use_gram() const { return gram.size() > 0; }
};

// Gradient bookkeeping for X'(y - X b): either through the Gram matrix or
// through the residual.
class Coordinates {
 public:
  Coordinates(const DesignProblem& problem, const DesignCache& cache, const Eigen::VectorXd& beta)
      : problem_(&problem), cache_(&cache) {
    if (cache.use_gram()) {
      corr_ = cache.xty - cache.gram * beta;
    } else {
      residual_ = problem.y() - problem.X() * beta;
    }
  }

  double col_sq(Eigen::Index j) const { return cache_->col_sq(j); }

  // X_j' (y - X b).
  double correlation(Eigen::Index j) const {
    return cache_->use_gram() ? corr_(j) : problem_->X().col(j).dot(residual_);
  }

  void shift(Eigen::Index j, double delta) {
    if (cache_->use_gram()) {
      corr_.noalias() -= delta * cache_->gram.col(j);
    } else {
      residual_.noalias() -= delta * problem_->X().col(j);
    }
  }

 private:
  const DesignProblem* problem_;
  const DesignCache* cache_;
  Eigen::VectorXd corr_;
  Eigen::VectorXd residual_;
};

// One pass over `indices`; returns the largest column-norm-scaled change.
template <class Indices>
double sweep(Coordinates& c, Eigen::VectorXd& beta, double lambda, const Indices& indices) {
  double max_change = 0.0;
  for (const Eigen::Index j : indices) {
    const double a = c.col_sq(j);
    if (a == 0.0) continue;
    const double old = beta(j);
    const double updated = soft(c.correlation(j) + a * old, lambda) / a;
    const double delta = updated - old;
    if (delta != 0.0) {
      beta(j) = updated;
      c.shift(j, delta);
      max_change = std::max(max_change, std::abs(delta) * std::sqrt(a));
    }
  }
  return max_change;
}

std::vector<Eigen::Index> support_of(const Eigen::VectorXd& beta) {
  std::vector<Eigen::Index> s;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) s.push_back(j);
  }
  return s;
}

// Active-set refinement on the current support. Each round solves the
// smooth problem on the face fixed by the signs of beta; when the solution
// leaves the face, beta moves toward it until the first coefficient hits
// zero, that coefficient is dropped and the round repeats. Every move stays
// on a segment toward a face minimizer, so the objective never increases.
std::optional<Eigen::VectorXd> polish_on_support(const DesignProblem& problem, const DesignCache& cache,
                                                 const Eigen::VectorXd& beta,
                                                 std::vector<Eigen::Index> active, double lambda) {
  Eigen::VectorXd current = beta;
  while (!active.empty() && static_cast<Eigen::Index>(active.size()) <= problem.n()) {
    const Eigen::Index m = static_cast<Eigen::Index>(active.size());
    Eigen::VectorXd rhs = cache.xty(active);
    for (Eigen::Index i = 0; i < m; ++i) rhs(i) -= lambda * (current(active[i]) > 0.0 ? 1.0 : -1.0);
    Eigen::MatrixXd gram_aa;
    if (cache.use_gram()) {
      gram_aa = cache.gram(active, active);
    } else {
      const Eigen::MatrixXd XA = problem.X()(Eigen::all, active);
      gram_aa = XA.transpose() * XA;
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram_aa);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
    const Eigen::VectorXd target = ldlt.solve(rhs);
    if (!target.allFinite()) return std::nullopt;

    double step = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double from = current(active[i]);
      const double to = target(i);
      if (to == 0.0 || (to > 0.0) != (from > 0.0)) {
        const double t = from / (from - to);
        if (t < step) {
          step = t;
          blocking = i;
        }
      }
    }
    if (blocking < 0) {
      for (Eigen::Index i = 0; i < m; ++i) current(active[i]) = target(i);
      return current;
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      current(active[i]) += step * (target(i) - current(active[i]));
    }
    current(active[blocking]) = 0.0;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < m; ++i) {
      // Coefficients that crossed zero within rounding are dropped as well.
      if (i != blocking && current(active[i]) != 0.0 && (current(active[i]) > 0.0) == (beta(active[i]) > 0.0)) {
        kept.push_back(active[i]);
      } else {
        current(active[i]) = 0.0;
      }
    }
    active = std::move(kept);
  }
  return std::nullopt;
}

constexpr int kSweepsBeforePolish = 10;

}  // namespace

DesignProblem::DesignProblem(Eigen::MatrixXd X, Eigen::VectorXd y) : X_(std::move(X)), y_(std::move(y)) {
  if (X_.rows() == 0 || X_.cols() == 0) throw DomainError("design: empty matrix");
  if (X_.rows() != y_.size()) throw DomainError("design: X has " + std::to_string(X_.rows()) +
                                                " rows but y has " + std::to_string(y_.size()));
  if (!X_.allFinite() || !y_.allFinite()) throw DomainError("design: non-finite entries");
}

double lasso_objective(const DesignProblem& problem, const Eigen::VectorXd& beta, double lambda) {
  return 0.5 * (problem.y() - problem.X() * beta).squaredNorm() + lambda * beta.lpNorm<1>();
}

double lambda_max(const DesignProblem& problem) {
  return (problem.X().transpose() * problem.y()).cwiseAbs().maxCoeff();
}

double kkt_residual(const DesignProblem& problem, const Eigen::VectorXd& beta, double lambda) {
  const Eigen::VectorXd g = problem.X().transpose() * (problem.y() - problem.X() * beta);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double v = beta(j) != 0.0 ? std::abs(g(j) - lambda * (beta(j) > 0.0 ? 1.0 : -1.0))
                                    : std::max(0.0, std::abs(g(j)) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

namespace {

LassoFit fit_impl(const DesignProblem& problem, const DesignCache& cache, double lambda,
                  const std::optional<Eigen::VectorXd>& init, const LassoOptions& options) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lasso fit: lambda must be positive");
  if (!(options.tol > 0.0)) throw DomainError("lasso fit: tol must be positive");
  const Eigen::Index p = problem.p();
  if (init && init->size() != p) throw DomainError("lasso fit: init has the wrong length");

  LassoFit out;
  out.lambda = lambda;
  out.beta = init ? *init : Eigen::VectorXd::Zero(p);
  Coordinates coords(problem, cache, out.beta);
  const double kkt_tol = 10.0 * options.tol;

  std::vector<Eigen::Index> all(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) all[static_cast<std::size_t>(j)] = j;

  for (int s = 1; s <= options.max_sweeps; ++s) {
    const double full_change = sweep(coords, out.beta, lambda, all);
    out.iterations = s;
    if (options.record_objective) out.objective_trace.push_back(lasso_objective(problem, out.beta, lambda));

    if (full_change > options.tol) {
      // Converge on the current active set before the next full sweep.
      // A slow inner phase means the support is settled but badly conditioned;
      // the direct solve on that face finishes it when the signs stay put.
      const std::vector<Eigen::Index> active = support_of(out.beta);
      for (int inner = 0; inner < options.max_sweeps; ++inner) {
        if (sweep(coords, out.beta, lambda, active) <= options.tol) break;
        if ((inner + 1) % kSweepsBeforePolish == 0) {
          const double before = lasso_objective(problem, out.beta, lambda);
          if (auto polished = polish_on_support(problem, cache, out.beta, support_of(out.beta), lambda);
              polished && lasso_objective(problem, *polished, lambda) <= before * (1.0 + 1e-14)) {
            out.beta = std::move(*polished);
            coords = Coordinates(problem, cache, out.beta);
            break;
          }
        }
      }
      continue;
    }
    out.kkt_residual = kkt_residual(problem, out.beta, lambda);
    if (out.kkt_residual <= kkt_tol) {
      out.support = support_of(out.beta);
      out.objective = lasso_objective(problem, out.beta, lambda);
      return out;
    }
    // Accumulated drift in the incremental gradient; restart the bookkeeping.
    coords = Coordinates(problem, cache, out.beta);
  }
  out.support = support_of(out.beta);
  out.objective = lasso_objective(problem, out.beta, lambda);
  out.kkt_residual = kkt_residual(problem, out.beta, lambda);
  throw ConvergenceError("lasso fit: no convergence after " + std::to_string(options.max_sweeps) +
                             " sweeps (KKT residual " + std::to_string(out.kkt_residual) + ")",
                         std::move(out));
}

}  // namespace

LassoFit fit(const DesignProblem& problem, double lambda, const std::optional<Eigen::VectorXd>& init,
             const LassoOptions& options) {
  const DesignCache cache(problem, problem.p() <= options.covariance_max_p);
  return fit_impl(problem, cache, lambda, init, options);
}

std::size_t LassoPathResult::failed_count() const {
  return static_cast<std::size_t>(
      std::count_if(errors.begin(), errors.end(), [](const std::string& e) { return !e.empty(); }));
}

LassoPathResult path(const DesignProblem& problem, const std::vector<double>& lambdas,
                     const LassoOptions& options) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw DomainError("lasso path: penalties must be positive");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) throw DomainError("lasso path: grid must be strictly descending");
  }
  LassoPathResult out;
  out.lambdas = lambdas;
  out.fits.reserve(lambdas.size());
  out.errors.resize(lambdas.size());
  const DesignCache cache(problem, problem.p() <= options.covariance_max_p);
  std::optional<Eigen::VectorXd> warm;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    try {
      out.fits.push_back(fit_impl(problem, cache, lambdas[i], warm, options));
    } catch (const ConvergenceError& e) {
      out.errors[i] = e.what();
      out.fits.push_back(e.last_fit());
    }
    warm = out.fits.back().beta;
  }
  return out;
}

}  // namespace lassodiag
