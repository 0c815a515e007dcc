#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lassodiag/lasso.hpp"
#include "lassodiag/region.hpp"

namespace lassodiag {

struct BetaLevel {
  double magnitude = 0.0;
  int count = 0;
};

/// Penalty grid used for every simulated instance: n_points log-spaced values
/// from min_ratio * lambda_max to lambda_max, with lambda_max = max_j |X_j' y|.
struct SimulationGrid {
  int n_points = 50;
  double min_ratio = 0.01;
};

struct SimulationConfig {
  int n = 0;
  int p = 0;
  int k = 0;
  std::vector<BetaLevel> beta_spec;
  double sigma = 0.0;
  SimulationGrid lambda_grid;
  int trials = 1;
  std::uint64_t seed = 0;
  /// Worker threads for trials; 0 selects the hardware concurrency. Results do not depend on it.
  int threads = 1;

  /// Throws DomainError unless the level counts sum to k <= p, n >= 1, trials >= 1,
  /// magnitudes are positive and sigma is finite and nonnegative.
  void validate() const;
  ProblemShape shape() const;
};

/// Parses a config object. "n" and "sigma" may be arrays, in which case one
/// config per (n, sigma) pair is returned, n varying slowest.
std::vector<SimulationConfig> simulation_configs_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimulationConfig& config);

struct SimulatedInstance {
  DesignProblem problem;
  Eigen::VectorXd beta;
  /// Indices of the nonzero coefficients, ascending.
  std::vector<Eigen::Index> true_support;
};

/// X_ij ~ N(0, 1/n), beta levels at uniformly random positions, z ~ N(0, sigma^2).
/// The random stream is a function of (seed, trial_index) only.
SimulatedInstance generate(const SimulationConfig& config, std::uint64_t trial_index);

/// Exact counts; fdp is 0 for an empty fit.
TradeoffPoint tpp_fdp(const LassoFit& fit, const std::vector<Eigen::Index>& true_support, int k);

struct EmpiricalPoint {
  double lambda = 0.0;  // mean over trials of the grid value at this index
  double mean_tpp = 0.0;
  double mean_fdp = 0.0;
  double std_tpp = 0.0;  // sample standard deviation, 0 for a single trial
  double std_fdp = 0.0;
  int n_trials = 0;
};

struct EmpiricalPath {
  SimulationConfig config;
  std::vector<EmpiricalPoint> points;  // lambda descending
  int failed_trials = 0;
  std::vector<std::string> failures;  // "trial i: message"
};

/// Runs every trial's Lasso path and averages by grid index in trial order.
/// Trials with a solver failure are excluded; more than 10% failures raise SolverError.
EmpiricalPath run(const SimulationConfig& config);

/// Linear interpolation of mean fdp at a mean tpp inside the path's range.
std::optional<double> fdp_at_tpp(const EmpiricalPath& path, double tpp);

struct ContainmentEntry {
  TradeoffPoint point;
  ConstraintCheck check;
};

struct ContainmentReport {
  ProblemShape shape;
  double slack = 0.0;
  std::vector<ContainmentEntry> entries;

  double fraction_passing() const;
};

ContainmentReport containment_report(const std::vector<TradeoffPoint>& points, const ProblemShape& shape,
                                     double slack);
/// Uses the mean points of the path. Requires slack > 0.
ContainmentReport containment_report(const EmpiricalPath& path, const ProblemShape& shape, double slack);

nlohmann::json to_json(const ContainmentReport& report);

/// Columns lambda, mean_tpp, mean_fdp, std_tpp, std_fdp.
std::string to_csv(const EmpiricalPath& path);
nlohmann::json to_json(const EmpiricalPath& path);

}  // namespace lassodiag
