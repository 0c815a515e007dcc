#include "lassodiag/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "lassodiag/output.hpp"

namespace lassodiag {
namespace {

constexpr double kMaxFailedFraction = 0.10;

std::vector<double> as_list(const nlohmann::json& v) {
  if (v.is_array()) return v.get<std::vector<double>>();
  return {v.get<double>()};
}

struct TrialResult {
  bool ok = false;
  std::string error;
  std::vector<double> lambdas;
  std::vector<TradeoffPoint> points;
};

TrialResult run_trial(const SimulationConfig& config, std::uint64_t trial) {
  TrialResult r;
  try {
    const SimulatedInstance inst = generate(config, trial);
    const double top = lambda_max(inst.problem);
    if (!(top > 0.0)) throw SolverError("lambda_max is zero", 0.0);
    const int m = config.lambda_grid.n_points;
    r.lambdas.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const double f = m == 1 ? 0.0 : static_cast<double>(i) / (m - 1);
      r.lambdas[static_cast<std::size_t>(i)] = top * std::pow(config.lambda_grid.min_ratio, f);
    }
    const LassoPathResult lp = path(inst.problem, r.lambdas);
    if (lp.failed_count() > 0) {
      const auto it = std::find_if(lp.errors.begin(), lp.errors.end(), [](const std::string& e) { return !e.empty(); });
      throw SolverError(*it, 0.0);
    }
    for (const LassoFit& f : lp.fits) r.points.push_back(tpp_fdp(f, inst.true_support, config.k));
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

void SimulationConfig::validate() const {
  if (n < 1) throw DomainError("simulation: n must be at least 1");
  if (p < 1) throw DomainError("simulation: p must be at least 1");
  if (trials < 1) throw DomainError("simulation: trials must be at least 1");
  if (threads < 0) throw DomainError("simulation: threads must be nonnegative");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("simulation: sigma must be finite and nonnegative");
  if (lambda_grid.n_points < 2) throw DomainError("simulation: lambda grid needs at least two points");
  if (!(lambda_grid.min_ratio > 0.0 && lambda_grid.min_ratio < 1.0)) {
    throw DomainError("simulation: lambda grid min_ratio must lie in (0, 1)");
  }
  int total = 0;
  for (const BetaLevel& b : beta_spec) {
    if (!(b.magnitude > 0.0) || !std::isfinite(b.magnitude)) throw DomainError("simulation: beta magnitudes must be positive");
    if (b.count < 0) throw DomainError("simulation: beta level counts must be nonnegative");
    total += b.count;
  }
  if (total != k) throw DomainError("simulation: beta level counts sum to " + std::to_string(total) +
                                    " but k = " + std::to_string(k));
  if (k < 1 || k > p) throw DomainError("simulation: need 1 <= k <= p");
}

ProblemShape SimulationConfig::shape() const {
  return ProblemShape(static_cast<double>(n) / p, static_cast<double>(k) / p);
}

std::vector<SimulationConfig> simulation_configs_from_json(const nlohmann::json& j) {
  try {
    SimulationConfig base;
    base.p = j.at("p").get<int>();
    base.k = j.at("k").get<int>();
    for (const auto& level : j.at("beta_spec")) {
      base.beta_spec.push_back({level.at("magnitude").get<double>(), level.at("count").get<int>()});
    }
    base.trials = j.value("trials", 1);
    base.seed = j.value("seed", std::uint64_t{0});
    base.threads = j.value("threads", 1);
    if (j.contains("lambda_grid")) {
      const auto& g = j.at("lambda_grid");
      base.lambda_grid.n_points = g.value("n_points", base.lambda_grid.n_points);
      base.lambda_grid.min_ratio = g.value("min_ratio", base.lambda_grid.min_ratio);
    }
    std::vector<SimulationConfig> out;
    for (const double n : as_list(j.at("n"))) {
      for (const double s : as_list(j.value("sigma", nlohmann::json(0.0)))) {
        SimulationConfig c = base;
        if (n != std::floor(n)) throw DomainError("simulation: n must be an integer");
        c.n = static_cast<int>(n);
        c.sigma = s;
        c.validate();
        out.push_back(std::move(c));
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("simulation config: ") + e.what());
  }
}

nlohmann::json to_json(const SimulationConfig& c) {
  nlohmann::json levels = nlohmann::json::array();
  for (const BetaLevel& b : c.beta_spec) levels.push_back({{"magnitude", b.magnitude}, {"count", b.count}});
  return {{"n", c.n},
          {"p", c.p},
          {"k", c.k},
          {"beta_spec", levels},
          {"sigma", c.sigma},
          {"lambda_grid", {{"n_points", c.lambda_grid.n_points}, {"min_ratio", c.lambda_grid.min_ratio}}},
          {"trials", c.trials},
          {"seed", c.seed},
          {"threads", c.threads}};
}

SimulatedInstance generate(const SimulationConfig& config, std::uint64_t trial_index) {
  config.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(trial_index), static_cast<std::uint32_t>(trial_index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(config.p));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(config.p);
  std::size_t next = 0;
  for (const BetaLevel& level : config.beta_spec) {
    for (int c = 0; c < level.count; ++c) beta(order[next++]) = level.magnitude;
  }
  std::vector<Eigen::Index> support(order.begin(), order.begin() + config.k);
  std::sort(support.begin(), support.end());

  const double scale = 1.0 / std::sqrt(static_cast<double>(config.n));
  Eigen::MatrixXd X(config.n, config.p);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, j) = scale * gauss(rng);
  }
  Eigen::VectorXd y = X * beta;
  if (config.sigma > 0.0) {
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += config.sigma * gauss(rng);
  }
  return {DesignProblem(std::move(X), std::move(y)), std::move(beta), std::move(support)};
}

TradeoffPoint tpp_fdp(const LassoFit& fit, const std::vector<Eigen::Index>& true_support, int k) {
  if (k < 1) throw DomainError("tpp_fdp: k must be at least 1");
  std::size_t true_hits = 0;
  for (const Eigen::Index j : fit.support) {
    if (std::binary_search(true_support.begin(), true_support.end(), j)) ++true_hits;
  }
  const std::size_t discoveries = fit.support.size();
  const double fdp =
      discoveries == 0 ? 0.0 : static_cast<double>(discoveries - true_hits) / static_cast<double>(discoveries);
  return {static_cast<double>(true_hits) / k, fdp};
}

EmpiricalPath run(const SimulationConfig& config) {
  config.validate();
  const std::size_t trials = static_cast<std::size_t>(config.trials);
  std::vector<TrialResult> results(trials);

  unsigned workers = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : static_cast<unsigned>(config.threads);
  workers = std::min<unsigned>(workers, static_cast<unsigned>(trials));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t t = next++; t < trials; t = next++) results[t] = run_trial(config, t);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  EmpiricalPath out;
  out.config = config;
  const std::size_t m = static_cast<std::size_t>(config.lambda_grid.n_points);
  std::vector<double> sum_l(m), sum_t(m), sum_f(m), sq_t(m), sq_f(m);
  int used = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const TrialResult& r = results[t];
    if (!r.ok) {
      ++out.failed_trials;
      out.failures.push_back("trial " + std::to_string(t) + ": " + r.error);
      continue;
    }
    ++used;
    for (std::size_t i = 0; i < m; ++i) {
      sum_l[i] += r.lambdas[i];
      sum_t[i] += r.points[i].tpp;
      sum_f[i] += r.points[i].fdp;
    }
  }
  if (out.failed_trials > kMaxFailedFraction * config.trials || used == 0) {
    throw SolverError("simulation: " + std::to_string(out.failed_trials) + " of " + std::to_string(config.trials) +
                          " trials failed (first: " + out.failures.front() + ")",
                      out.failed_trials);
  }
  out.points.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.points[i].lambda = sum_l[i] / used;
    out.points[i].mean_tpp = sum_t[i] / used;
    out.points[i].mean_fdp = sum_f[i] / used;
    out.points[i].n_trials = used;
  }
  for (std::size_t t = 0; t < trials; ++t) {
    if (!results[t].ok) continue;
    for (std::size_t i = 0; i < m; ++i) {
      sq_t[i] += std::pow(results[t].points[i].tpp - out.points[i].mean_tpp, 2);
      sq_f[i] += std::pow(results[t].points[i].fdp - out.points[i].mean_fdp, 2);
    }
  }
  if (used > 1) {
    for (std::size_t i = 0; i < m; ++i) {
      out.points[i].std_tpp = std::sqrt(sq_t[i] / (used - 1));
      out.points[i].std_fdp = std::sqrt(sq_f[i] / (used - 1));
    }
  }
  return out;
}

std::optional<double> fdp_at_tpp(const EmpiricalPath& path, double tpp) {
  std::vector<std::pair<double, double>> pts;
  for (const EmpiricalPoint& p : path.points) pts.emplace_back(p.mean_tpp, p.mean_fdp);
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto [t0, f0] = pts[i];
    const auto [t1, f1] = pts[i + 1];
    if (tpp < t0 || tpp > t1) continue;
    if (t1 == t0) return 0.5 * (f0 + f1);
    return f0 + (f1 - f0) * (tpp - t0) / (t1 - t0);
  }
  return std::nullopt;
}

double ContainmentReport::fraction_passing() const {
  if (entries.empty()) return 1.0;
  const auto pass = std::count_if(entries.begin(), entries.end(), [](const ContainmentEntry& e) { return e.check.all(); });
  return static_cast<double>(pass) / static_cast<double>(entries.size());
}

ContainmentReport containment_report(const std::vector<TradeoffPoint>& points, const ProblemShape& shape,
                                     double slack) {
  if (!(slack >= 0.0)) throw DomainError("containment_report: slack must be nonnegative");
  ContainmentReport r{shape, slack, {}};
  for (const TradeoffPoint& p : points) r.entries.push_back({p, check_constraints(p, shape, slack)});
  return r;
}

ContainmentReport containment_report(const EmpiricalPath& path, const ProblemShape& shape, double slack) {
  if (!(slack > 0.0)) throw DomainError("containment_report: slack must be positive for empirical paths");
  std::vector<TradeoffPoint> pts;
  for (const EmpiricalPoint& p : path.points) pts.push_back({p.mean_tpp, p.mean_fdp});
  return containment_report(pts, shape, slack);
}

nlohmann::json to_json(const ContainmentReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const ContainmentEntry& e : r.entries) {
    pts.push_back({{"tpp", e.point.tpp},
                   {"fdp", e.point.fdp},
                   {"pass", e.check.all()},
                   {"constraints",
                    {{"tpp_range", e.check.tpp_range},
                     {"fdp_range", e.check.fdp_range},
                     {"above_lower", e.check.above_lower},
                     {"discoveries", e.check.discoveries}}}});
  }
  return {{"schema_version", kSchemaVersion},
          {"delta", r.shape.delta()},
          {"epsilon", r.shape.epsilon()},
          {"slack", r.slack},
          {"fraction_passing", r.fraction_passing()},
          {"points", pts}};
}

std::string to_csv(const EmpiricalPath& path) {
  std::vector<std::vector<double>> rows;
  for (const EmpiricalPoint& p : path.points) rows.push_back({p.lambda, p.mean_tpp, p.mean_fdp, p.std_tpp, p.std_fdp});
  return csv_table({"lambda", "mean_tpp", "mean_fdp", "std_tpp", "std_fdp"}, rows);
}

nlohmann::json to_json(const EmpiricalPath& path) {
  nlohmann::json pts = nlohmann::json::array();
  for (const EmpiricalPoint& p : path.points) {
    pts.push_back({{"lambda", p.lambda},
                   {"mean_tpp", p.mean_tpp},
                   {"mean_fdp", p.mean_fdp},
                   {"std_tpp", p.std_tpp},
                   {"std_fdp", p.std_fdp},
                   {"n_trials", p.n_trials}});
  }
  return {{"schema_version", kSchemaVersion},
          {"config", to_json(path.config)},
          {"failed_trials", path.failed_trials},
          {"failures", path.failures},
          {"points", pts}};
}

}  // namespace lassodiag
