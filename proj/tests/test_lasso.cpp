#include <doctest.h>

#include <random>

#include "lassodiag/lasso.hpp"
#include "oracles.hpp"

using namespace lassodiag;

namespace {

DesignProblem random_problem(int n, int p, std::uint64_t seed, int k = 3, double noise = 0.1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd X(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = g(rng) / std::sqrt(double(n));
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < k && j < p; ++j) beta(j) = 1.0 + j;
  Eigen::VectorXd y = X * beta;
  for (int i = 0; i < n; ++i) y(i) += noise * g(rng);
  return DesignProblem(X, y);
}

// Largest violation of the optimality conditions, computed independently.
double subgradient_violation(const DesignProblem& pr, const Eigen::VectorXd& b, double lambda) {
  const Eigen::VectorXd c = pr.X().transpose() * (pr.y() - pr.X() * b);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    const double v = b(j) != 0.0 ? std::abs(c(j) - lambda * (b(j) > 0 ? 1.0 : -1.0))
                                 : std::max(0.0, std::abs(c(j)) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

TEST_SUITE("lasso") {
  TEST_CASE("orthonormal design has the soft-threshold closed form") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    Eigen::MatrixXd A(6, 6);
    for (int i = 0; i < 36; ++i) A.data()[i] = g(rng);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
    Eigen::VectorXd y(6);
    for (int i = 0; i < 6; ++i) y(i) = 2 * g(rng);
    const DesignProblem pr(Q, y);
    const double lambda = 0.7;
    const LassoFit f = fit(pr, lambda);
    const Eigen::VectorXd xty = Q.transpose() * y;
    for (int j = 0; j < 6; ++j) CHECK(std::abs(f.beta(j) - oracle::soft(xty(j), lambda)) < 1e-10);
  }

  TEST_CASE("penalty at or above lambda_max gives the empty model") {
    const DesignProblem pr = random_problem(20, 30, 2);
    const double lm = (pr.X().transpose() * pr.y()).cwiseAbs().maxCoeff();
    CHECK(lambda_max(pr) == doctest::Approx(lm).epsilon(1e-14));
    for (double lambda : {lm, 1.5 * lm}) {
      const LassoFit f = fit(pr, lambda);
      CHECK(f.support.empty());
      CHECK(f.beta.isZero(0.0));
    }
  }

  TEST_CASE("small instances match the proximal-gradient oracle") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
      const DesignProblem pr = random_problem(8, 12, seed);
      const double lambda = 0.3;
      const LassoFit f = fit(pr, lambda);
      const Eigen::VectorXd ref = oracle::prox_gradient_lasso(pr.X(), pr.y(), lambda, 100000);
      const double ref_obj = oracle::lasso_obj(pr.X(), pr.y(), ref, lambda);
      CHECK(std::abs(f.objective - ref_obj) < 1e-6);
      CHECK(f.objective <= ref_obj + 1e-12);
      CHECK(subgradient_violation(pr, f.beta, lambda) < 1e-7);
      CHECK(f.kkt_residual < 1e-7);
    }
  }

  TEST_CASE("objective helper matches the definition") {
    const DesignProblem pr = random_problem(8, 12, 3);
    Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(12, -1, 1);
    CHECK(lasso_objective(pr, b, 0.4) == doctest::Approx(oracle::lasso_obj(pr.X(), pr.y(), b, 0.4)).epsilon(1e-14));
  }

  TEST_CASE("objective trace never increases") {
    const DesignProblem pr = random_problem(40, 80, 4, 10, 0.5);
    LassoOptions opt;
    opt.record_objective = true;
    const LassoFit f = fit(pr, 0.05 * lambda_max(pr), std::nullopt, opt);
    REQUIRE(f.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < f.objective_trace.size(); ++i) {
      CHECK(f.objective_trace[i] <= f.objective_trace[i - 1] * (1 + 1e-13));
    }
  }

  TEST_CASE("fit beats the zero vector and the initial point") {
    const DesignProblem pr = random_problem(30, 60, 5, 8, 0.3);
    const double lambda = 0.1 * lambda_max(pr);
    const Eigen::VectorXd init = Eigen::VectorXd::Constant(60, 0.2);
    const LassoFit f = fit(pr, lambda, init);
    CHECK(f.objective <= lasso_objective(pr, Eigen::VectorXd::Zero(60), lambda));
    CHECK(f.objective <= lasso_objective(pr, init, lambda));
  }

  TEST_CASE("path fits stay within n variables and certify KKT") {
    const DesignProblem pr = random_problem(20, 50, 6, 10, 0.2);
    std::vector<double> grid;
    const double lm = lambda_max(pr);
    for (int i = 0; i < 30; ++i) grid.push_back(1.2 * lm * std::pow(1e-4, i / 29.0));
    const LassoPathResult r = path(pr, grid);
    CHECK(r.failed_count() == 0);
    CHECK(r.fits.front().support.empty());
    for (const LassoFit& f : r.fits) {
      CHECK(f.support.size() <= 20);
      CHECK(f.kkt_residual < 1e-7);
      CHECK(subgradient_violation(pr, f.beta, f.lambda) < 1e-7);
    }
  }

  TEST_CASE("support grows along the top of the path when n exceeds p") {
    const DesignProblem pr = random_problem(60, 20, 7, 6, 0.2);
    std::vector<double> grid;
    const double lm = lambda_max(pr);
    for (int i = 0; i < 10; ++i) grid.push_back(lm * std::pow(0.5, i / 9.0));
    const LassoPathResult r = path(pr, grid);
    for (std::size_t i = 1; i < r.fits.size(); ++i) CHECK(r.fits[i].support.size() >= r.fits[i - 1].support.size());
  }

  TEST_CASE("sweep budget exhaustion raises a convergence error") {
    const DesignProblem pr = random_problem(40, 80, 8, 10, 0.5);
    LassoOptions opt;
    opt.max_sweeps = 1;
    opt.tol = 1e-14;
    try {
      fit(pr, 1e-3 * lambda_max(pr), std::nullopt, opt);
      FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
      CHECK(e.last_fit().beta.size() == 80);
      CHECK(e.last_fit().kkt_residual > 0.0);
    }
  }

  TEST_CASE("residual updates agree with covariance updates") {
    const DesignProblem pr = random_problem(30, 60, 9, 8, 0.3);
    const double lambda = 0.05 * lambda_max(pr);
    LassoOptions naive;
    naive.covariance_max_p = 0;
    const LassoFit a = fit(pr, lambda);
    const LassoFit b = fit(pr, lambda, std::nullopt, naive);
    CHECK(std::abs(a.objective - b.objective) < 1e-9);
    CHECK(a.support == b.support);
  }

  TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS(DesignProblem(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(4)));
    Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(3, 2);
    bad(0, 0) = std::nan("");
    CHECK_THROWS(DesignProblem(bad, Eigen::VectorXd::Zero(3)));
    const DesignProblem pr = random_problem(5, 5, 10);
    CHECK_THROWS(fit(pr, 0.0));
  }
}
