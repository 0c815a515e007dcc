#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "lassodiag/errors.hpp"

namespace lassodiag {

/// Regression data y = X beta + z.
class DesignProblem {
 public:
  /// Throws DomainError on a size mismatch, empty design or non-finite entry.
  DesignProblem(Eigen::MatrixXd X, Eigen::VectorXd y);

  const Eigen::MatrixXd& X() const noexcept { return X_; }
  const Eigen::VectorXd& y() const noexcept { return y_; }
  Eigen::Index n() const noexcept { return X_.rows(); }
  Eigen::Index p() const noexcept { return X_.cols(); }

 private:
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
};

struct LassoOptions {
  /// Stop when max_j |delta beta_j| * ||X_j|| <= tol and the KKT residual is at most 10 tol.
  double tol = 1e-8;
  int max_sweeps = 100000;
  /// Records the objective after every full sweep.
  bool record_objective = false;
  /// Gram-matrix updates up to this many columns, residual updates beyond.
  Eigen::Index covariance_max_p = 2000;
};

struct LassoFit {
  double lambda = 0.0;
  Eigen::VectorXd beta;
  /// Indices with beta_j != 0, ascending.
  std::vector<Eigen::Index> support;
  int iterations = 0;  // full sweeps
  double kkt_residual = 0.0;
  double objective = 0.0;
  std::vector<double> objective_trace;
};

class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, LassoFit last)
      : SolverError(what, last.kkt_residual), last_(std::move(last)) {}

  const LassoFit& last_fit() const noexcept { return last_; }

 private:
  LassoFit last_;
};

/// 0.5 ||y - X b||^2 + lambda ||b||_1.
double lasso_objective(const DesignProblem& problem, const Eigen::VectorXd& beta, double lambda);

/// max_j |X_j' y|, the smallest penalty with an all-zero solution.
double lambda_max(const DesignProblem& problem);

/// Largest KKT violation: |X_j'r - lambda sign(b_j)| on the support,
/// (|X_j'r| - lambda)_+ off it, with r = y - X b.
double kkt_residual(const DesignProblem& problem, const Eigen::VectorXd& beta, double lambda);

/// Cyclic coordinate descent with an active-set inner loop. Exact zeros come
/// from the soft-threshold update. Throws ConvergenceError after max_sweeps.
LassoFit fit(const DesignProblem& problem, double lambda,
             const std::optional<Eigen::VectorXd>& init = std::nullopt, const LassoOptions& options = {});

struct LassoPathResult {
  std::vector<double> lambdas;
  /// One per lambda; a failed fit holds the last iterate of the solver.
  std::vector<LassoFit> fits;
  /// Empty on success.
  std::vector<std::string> errors;

  std::size_t failed_count() const;
};

/// Warm-started fits along a strictly descending positive grid.
LassoPathResult path(const DesignProblem& problem, const std::vector<double>& lambdas,
                     const LassoOptions& options = {});

}  // namespace lassodiag
