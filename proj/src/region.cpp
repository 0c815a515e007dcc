#include "lassodiag/region.hpp"

#include <algorithm>
#include <cmath>

#include "lassodiag/errors.hpp"

namespace lassodiag {

std::string_view to_string(DiagramCase c) noexcept {
  switch (c) {
    case DiagramCase::kCase1:
      return "Case1";
    case DiagramCase::kCase2:
      return "Case2";
    case DiagramCase::kCase3:
      return "Case3";
  }
  return "unknown";
}

ConstraintCheck check_constraints(const TradeoffPoint& point, const ProblemShape& shape, double slack) {
  if (!(slack >= 0.0)) throw DomainError("check_constraints: slack must be nonnegative");
  const double eps = shape.epsilon();
  ConstraintCheck c;
  c.tpp_range = point.tpp >= -slack && point.tpp <= 1.0 + slack;
  c.fdp_range = point.fdp >= -slack && point.fdp <= 1.0 - eps + slack;
  c.discoveries = eps / shape.delta() * point.tpp + point.fdp <= 1.0 + slack;

  const double ceiling = u_star(shape);
  if (point.tpp > ceiling + slack) {
    c.above_lower = false;
  } else {
    const double u = std::clamp(point.tpp, 0.0, ceiling);
    c.above_lower = point.fdp >= q_star(u, shape) - slack;
  }
  return c;
}

bool contains(const TradeoffPoint& point, const ProblemShape& shape, double slack) {
  return check_constraints(point, shape, slack).all();
}

CaseClassification classify_case(const ProblemShape& shape) {
  CaseClassification c;
  if (shape.delta() >= 1.0) return c;
  c.l2_active = true;
  if (shape.epsilon() <= epsilon_star(shape.delta()).epsilon_star) {
    c.label = DiagramCase::kCase2;
    return c;
  }
  c.label = DiagramCase::kCase3;
  c.full_power_edge = false;
  c.power_ceiling = true;
  return c;
}

std::vector<TradeoffPoint> RegionSpec::vertices() const {
  std::vector<TradeoffPoint> out;
  out.reserve(lower.samples.size() + upper_polyline.size());
  for (const BoundarySample& s : lower.samples) out.push_back({s.u, s.q});
  // The polyline ends at the origin, which is already the first lower sample.
  for (std::size_t i = 0; i + 1 < upper_polyline.size(); ++i) out.push_back(upper_polyline[i]);
  return out;
}

RegionSpec region_polygon(const ProblemShape& shape, int n_samples) {
  if (n_samples < 16) throw DomainError("region_polygon: n_samples must be at least 16");
  const CaseClassification cls = classify_case(shape);
  RegionSpec spec{shape, cls.label, dt_transition(shape), sample_lower_boundary(shape, n_samples), {}};
  const double top = l1_value(shape);
  auto& poly = spec.upper_polyline;
  switch (cls.label) {
    case DiagramCase::kCase1:
      poly.push_back({1.0, top});
      break;
    case DiagramCase::kCase2:
      poly.push_back({1.0, l2_value(1.0, shape)});
      poly.push_back({shape.delta(), top});
      break;
    case DiagramCase::kCase3:
      // The lower boundary already ends on l2 at u*.
      poly.push_back({shape.delta(), top});
      break;
  }
  poly.push_back({0.0, top});
  poly.push_back({0.0, 0.0});
  return spec;
}

double signed_area(const std::vector<TradeoffPoint>& polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const TradeoffPoint& a = polygon[i];
    const TradeoffPoint& b = polygon[(i + 1) % n];
    twice += a.tpp * b.fdp - b.tpp * a.fdp;
  }
  return 0.5 * twice;
}

namespace {

double cross(const TradeoffPoint& o, const TradeoffPoint& a, const TradeoffPoint& b) {
  return (a.tpp - o.tpp) * (b.fdp - o.fdp) - (a.fdp - o.fdp) * (b.tpp - o.tpp);
}

bool segments_intersect(const TradeoffPoint& p1, const TradeoffPoint& p2, const TradeoffPoint& q1,
                        const TradeoffPoint& q2) {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

bool is_simple_polygon(const std::vector<TradeoffPoint>& polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
      if (segments_intersect(polygon[i], polygon[(i + 1) % n], polygon[j], polygon[(j + 1) % n])) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace lassodiag
