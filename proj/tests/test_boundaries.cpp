#include <doctest.h>

#include "lassodiag/boundaries.hpp"
#include "lassodiag/errors.hpp"
#include "oracles.hpp"

using namespace lassodiag;

TEST_SUITE("boundaries") {
  TEST_CASE("t_star at the transition ceiling equals the transition root") {
    const ProblemShape shape(0.5, 0.3);
    const DtTransition dt = epsilon_star(0.5);
    const double u_prime = 1 - (1 - 0.5) * (0.3 - dt.epsilon_star) / (0.3 * (1 - dt.epsilon_star));
    CHECK(std::abs(t_star(u_prime, shape) - dt.t_star) < 1e-6);
  }

  TEST_CASE("t_star grows as u shrinks and decreases on a grid") {
    const ProblemShape shape(0.7, 0.3);
    CHECK(t_star(1e-3, shape) > t_star(0.5, shape));
    double prev = 1e300;
    for (int i = 0; i < 100; ++i) {
      const double u = 0.005 + 0.99 * i / 99.0;
      const double t = t_star(u, shape);
      CHECK(t < prev);
      prev = t;
    }
  }

  TEST_CASE("t_star solves the parametric pair") {
    const ProblemShape shape(0.85, 0.5);
    for (double u : {0.05, 0.3, 0.6, 0.9}) {
      const double t = t_star(u, shape);
      CHECK(std::abs(oracle::boundary_u(t, 0.85, 0.5) - u) < 1e-9);
      CHECK(std::abs(q_star(u, shape) - oracle::boundary_q(t, 0.85, 0.5)) < 1e-9);
    }
  }

  TEST_CASE("q_star reference values") {
    const ProblemShape high(0.85, 0.8);
    CHECK(std::abs(q_star(u_star(high), high) - 0.16) <= 0.01);
    const ProblemShape mid(0.85, 0.5);
    CHECK(std::abs(q_star(1.0 - 1e-6, mid) - 0.36) <= 0.01);
    CHECK(q_star(1e-4, ProblemShape(0.7, 0.3)) < 1e-2);
    CHECK(q_star(1e-6, ProblemShape(0.7, 0.3)) >= 0.0);
  }

  TEST_CASE("epsilon_star brackets the reference shapes") {
    CHECK(epsilon_star(0.5).epsilon_star < 0.3);
    CHECK(epsilon_star(0.7).epsilon_star > 0.3);
    CHECK_THROWS_AS(epsilon_star(1.0), DomainError);
  }

  TEST_CASE("epsilon_star matches a direct supremum over epsilon") {
    for (double delta : {0.1, 0.3, 0.5, 0.7, 0.95}) {
      CHECK(std::abs(epsilon_star(delta).epsilon_star - oracle::epsilon_star_direct(delta)) < 1e-8);
    }
  }

  TEST_CASE("transition identities hold") {
    for (double delta : {0.3, 0.5, 0.7, 0.9}) {
      const DtTransition dt = epsilon_star(delta);
      const double es = dt.epsilon_star, t = dt.t_star;
      const double lhs = 2 * (1 - es) * ((1 + t * t) * oracle::cdf(-t) - t * oracle::pdf(t)) + es * (1 + t * t);
      CHECK(std::abs(lhs - delta) < 1e-8);
      CHECK(std::abs(oracle::pdf(t) / t - delta / (2 * (1 - es))) < 1e-8);
      CHECK(std::abs(oracle::cdf(-t) - (delta - es) / (2 * (1 - es))) < 1e-8);
      const DtIdentityResiduals r = dt_identity_residuals(delta, dt, std::min(0.99, es + 0.1));
      CHECK(r.transition_equation < 1e-8);
      CHECK(r.density_ratio < 1e-8);
      CHECK(r.tail_mass < 1e-8);
      CHECK(std::abs(r.lower_boundary_root) < 1e-8);
    }
  }

  TEST_CASE("parametric transition pair round-trips") {
    for (int i = 0; i <= 48; ++i) {
      const double t = 0.2 + 4.8 * i / 48.0;
      const double d = transition_delta_at(t);
      if (!(d < 1.0)) continue;
      CHECK(std::abs(epsilon_star(d).epsilon_star - transition_epsilon_at(t)) < 1e-8);
    }
  }

  TEST_CASE("u_star examples") {
    CHECK(std::abs(u_star(ProblemShape(0.85, 0.8)) - 0.89) <= 0.01);
    CHECK(u_star(ProblemShape(1.3, 0.9)) == 1.0);
    CHECK(u_star(ProblemShape(0.7, 0.3)) == 1.0);
    const ProblemShape above(0.5, 0.3);
    const double u = u_star(above);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    CHECK(std::abs(q_star(u, above) - l2_value(u, above)) < 1e-6);
  }

  TEST_CASE("l1 and l2 examples") {
    CHECK(std::abs(l2_value(1.0, ProblemShape(0.85, 0.5)) - 0.411765) < 1e-6);
    CHECK(std::abs(l2_value(1.0, ProblemShape(0.85, 0.5)) - (1 - 0.5 / 0.85)) < 1e-12);
    CHECK(l1_value(ProblemShape(0.95, 0.722)) == doctest::Approx(0.278).epsilon(1e-12));
    CHECK(l2_value(0.0, ProblemShape(0.4, 0.2)) == 1.0);
  }

  TEST_CASE("q_star meets l2 exactly above the transition") {
    for (double delta : {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95}) {
      const double es = epsilon_star(delta).epsilon_star;
      for (double eps : {0.5 * es, 0.9 * es, es + 0.3 * (1 - es), es + 0.7 * (1 - es)}) {
        const ProblemShape shape(delta, eps);
        const auto hit = l2_intersection(shape);
        CHECK(hit.has_value() == (eps > es));
        if (hit) {
          CHECK(std::abs(*hit - u_star(shape)) < 1e-6);
          CHECK(std::abs(q_star(u_star(shape), shape) - l2_value(u_star(shape), shape)) <= 1e-6);
        }
      }
    }
  }

  TEST_CASE("q_star stays below the random-guess line") {
    for (const ProblemShape shape : {ProblemShape(1.0, 0.3), ProblemShape(0.7, 0.3), ProblemShape(0.5, 0.3),
                                     ProblemShape(0.85, 0.8), ProblemShape(2.0, 0.6)}) {
      const double top = u_star(shape);
      for (int i = 0; i <= 50; ++i) {
        const double u = std::clamp(top * i / 50.0, 1e-6, top - 1e-6);
        CHECK(q_star(u, shape) < l1_value(shape));
      }
    }
  }

  TEST_CASE("sampled boundary is monotone and bounded") {
    for (const ProblemShape shape : {ProblemShape(0.85, 0.8), ProblemShape(0.7, 0.3), ProblemShape(1.0, 0.3)}) {
      const BoundaryCurve c = sample_lower_boundary(shape, 200);
      REQUIRE(c.samples.size() == 200);
      for (std::size_t i = 1; i < c.samples.size(); ++i) {
        CHECK(c.samples[i].u > c.samples[i - 1].u);
        CHECK(c.samples[i].q >= c.samples[i - 1].q);
      }
      for (const BoundarySample& s : c.samples) {
        CHECK(s.q >= 0.0);
        CHECK(s.q <= 1 - shape.epsilon());
      }
    }
  }

  TEST_CASE("u outside the achievable range is rejected") {
    CHECK_THROWS_AS(q_star(0.99, ProblemShape(0.5, 0.3)), DomainError);
    CHECK_THROWS_AS(q_star(1.5, ProblemShape(1.0, 0.3)), DomainError);
  }
}

TEST_SUITE("boundaries_known_gap") {
  TEST_CASE("epsilon_star(0.95) below 0.722") {
    CHECK(epsilon_star(0.95).epsilon_star < 0.722);
  }
}
