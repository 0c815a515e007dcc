#include <doctest.h>

#include "lassodiag/boundaries.hpp"
#include "lassodiag/region.hpp"

using namespace lassodiag;

TEST_SUITE("region") {
  TEST_CASE("contains examples") {
    CHECK_FALSE(contains({0.5, 0.9}, ProblemShape(1.0, 0.3)));
    CHECK_FALSE(check_constraints({0.5, 0.9}, ProblemShape(1.0, 0.3), 0.0).fdp_range);
    for (const ProblemShape shape : {ProblemShape(1.0, 0.3), ProblemShape(0.5, 0.3), ProblemShape(0.85, 0.8)}) {
      CHECK(contains({0.0, 0.0}, shape));
    }
    // (0.5 / 0.85) * 1 + 0.5 = 1.088 > 1.
    const ConstraintCheck c = check_constraints({1.0, 0.5}, ProblemShape(0.85, 0.5), 0.0);
    CHECK(0.5 / 0.85 * 1.0 + 0.5 > 1.0);
    CHECK_FALSE(c.discoveries);
    CHECK_FALSE(c.all());
    CHECK_FALSE(contains({1.0, 0.5}, ProblemShape(0.85, 0.5)));
  }

  TEST_CASE("slack widens every constraint") {
    const ProblemShape shape(0.7, 0.3);
    CHECK_FALSE(contains({0.5, 0.71}, shape, 0.0));
    CHECK(contains({0.5, 0.71}, shape, 0.02));
    const double q = q_star(0.5, shape);
    CHECK_FALSE(contains({0.5, q - 0.01}, shape, 0.0));
    CHECK(contains({0.5, q - 0.01}, shape, 0.02));
    CHECK(contains({1.01, 0.5}, shape, 0.02));
    CHECK_FALSE(contains({1.01, 0.5}, shape, 0.0));
  }

  TEST_CASE("points past the power ceiling fail the lower constraint") {
    const ProblemShape shape(0.5, 0.3);
    const ConstraintCheck c = check_constraints({u_star(shape) + 0.05, 0.6}, shape, 0.0);
    CHECK_FALSE(c.above_lower);
  }

  TEST_CASE("exactly n discoveries lands on the l2 line") {
    // k/p = 0.3, n/p = 0.7: V false plus T true discoveries with V + T = n.
    const int p = 1000, k = 300, n = 700;
    const ProblemShape shape(double(n) / p, double(k) / p);
    for (int T : {50, 150, 300}) {
      const int V = n - T;
      const double tpp = double(T) / k, fdp = double(V) / n;
      CHECK(std::abs(shape.epsilon() / shape.delta() * tpp + fdp - 1.0) < 1e-12);
    }
  }

  TEST_CASE("case classification") {
    CHECK(classify_case(ProblemShape(1.0, 0.3)).label == DiagramCase::kCase1);
    CHECK(classify_case(ProblemShape(0.7, 0.3)).label == DiagramCase::kCase2);
    CHECK(classify_case(ProblemShape(0.5, 0.3)).label == DiagramCase::kCase3);
    CHECK(to_string(DiagramCase::kCase3) == "Case3");
    const CaseClassification c2 = classify_case(ProblemShape(0.7, 0.3));
    CHECK(c2.l1_active);
    CHECK(c2.l2_active);
    CHECK_FALSE(c2.power_ceiling);
    const CaseClassification c3 = classify_case(ProblemShape(0.5, 0.3));
    CHECK(c3.power_ceiling);
    CHECK_FALSE(c3.full_power_edge);
  }

  TEST_CASE("classification is stable under tiny perturbations of epsilon") {
    for (double delta : {0.3, 0.5, 0.7, 0.9, 1.0, 1.5}) {
      const double es = delta < 1.0 ? epsilon_star(delta).epsilon_star : -1.0;
      for (double eps : {0.05, 0.2, 0.3, 0.45, 0.6, 0.8}) {
        if (std::abs(eps - es) < 1e-9) continue;
        const DiagramCase base = classify_case(ProblemShape(delta, eps)).label;
        CHECK(classify_case(ProblemShape(delta, eps + 1e-12)).label == base);
        CHECK(classify_case(ProblemShape(delta, eps - 1e-12)).label == base);
      }
    }
  }

  TEST_CASE("case 1 polygon has the random-guess upper edge") {
    const ProblemShape shape(1.0, 0.3);
    const RegionSpec r = region_polygon(shape, 64);
    CHECK(r.case_label == DiagramCase::kCase1);
    REQUIRE(r.upper_polyline.size() >= 2);
    bool has_right = false, has_left = false;
    for (const TradeoffPoint& v : r.upper_polyline) {
      if (v.tpp == 1.0 && v.fdp == 0.7) has_right = true;
      if (v.tpp == 0.0 && v.fdp == 0.7) has_left = true;
    }
    CHECK(has_right);
    CHECK(has_left);
  }

  TEST_CASE("case 3 polygon ends the lower boundary where l2 meets q_star") {
    const ProblemShape shape(0.5, 0.3);
    const RegionSpec r = region_polygon(shape, 64);
    CHECK(r.case_label == DiagramCase::kCase3);
    REQUIRE(r.dt.has_value());
    double right = 0.0;
    for (const TradeoffPoint& v : r.vertices()) right = std::max(right, v.tpp);
    CHECK(std::abs(right - u_star(shape)) < 1e-12);
    const BoundarySample& last = r.lower.samples.back();
    CHECK(std::abs(last.u - u_star(shape)) < 1e-12);
    CHECK(std::abs(last.q - l2_value(last.u, shape)) < 1e-6);
  }

  TEST_CASE("polygons are simple, counterclockwise and self-consistent") {
    for (const ProblemShape shape : {ProblemShape(1.0, 0.3), ProblemShape(0.7, 0.3), ProblemShape(0.5, 0.3),
                                     ProblemShape(0.85, 0.8), ProblemShape(0.85, 0.5), ProblemShape(2.0, 0.1)}) {
      const RegionSpec r = region_polygon(shape, 96);
      const std::vector<TradeoffPoint> v = r.vertices();
      CHECK(signed_area(v) > 0.0);
      CHECK(is_simple_polygon(v));
      for (const BoundarySample& s : r.lower.samples) CHECK(contains({s.u, s.q}, shape, 1e-9));
      for (const TradeoffPoint& p : r.upper_polyline) CHECK(contains(p, shape, 1e-9));
    }
  }

  TEST_CASE("too few samples is rejected") {
    CHECK_THROWS(region_polygon(ProblemShape(1.0, 0.3), 8));
  }
}
