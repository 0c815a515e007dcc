#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "lassodiag/boundaries.hpp"

namespace lassodiag {

struct TradeoffPoint {
  double tpp = 0.0;
  double fdp = 0.0;
};

/// Diagram layouts:
///   kCase1  delta >= 1, only the fdp = 1 - epsilon line bounds the top;
///   kCase2  delta < 1, epsilon <= epsilon*: both straight lines active, full power reachable;
///   kCase3  delta < 1, epsilon > epsilon*: power capped at u* where q* meets l2.
enum class DiagramCase { kCase1, kCase2, kCase3 };

std::string_view to_string(DiagramCase c) noexcept;

struct CaseClassification {
  DiagramCase label = DiagramCase::kCase1;
  bool l1_active = true;         // fdp <= 1 - epsilon
  bool l2_active = false;        // (epsilon / delta) tpp + fdp <= 1
  bool full_power_edge = true;   // the vertical edge tpp = 1 belongs to the boundary
  bool power_ceiling = false;    // q* and l2 meet at tpp = u* < 1
};

/// Per-constraint outcome of the four membership conditions.
struct ConstraintCheck {
  bool tpp_range = true;     // 0 <= tpp <= 1
  bool fdp_range = true;     // 0 <= fdp <= 1 - epsilon
  bool above_lower = true;   // fdp >= q*(tpp)
  bool discoveries = true;   // (epsilon / delta) tpp + fdp <= 1

  bool all() const noexcept { return tpp_range && fdp_range && above_lower && discoveries; }
};

/// Evaluates each constraint with tolerance `slack`. Beyond the power ceiling
/// (tpp > u* + slack) the lower-boundary constraint fails.
ConstraintCheck check_constraints(const TradeoffPoint& point, const ProblemShape& shape, double slack);

bool contains(const TradeoffPoint& point, const ProblemShape& shape, double slack = 0.0);

CaseClassification classify_case(const ProblemShape& shape);

struct RegionSpec {
  ProblemShape shape;
  DiagramCase case_label;
  std::optional<DtTransition> dt;
  BoundaryCurve lower;
  /// Vertices after the last lower-boundary sample, running counterclockwise
  /// back to the origin.
  std::vector<TradeoffPoint> upper_polyline;

  /// Closed boundary: lower samples followed by upper_polyline (origin not repeated).
  std::vector<TradeoffPoint> vertices() const;
};

/// Boundary of the feasible region with n_samples points on q*. Requires n_samples >= 16.
RegionSpec region_polygon(const ProblemShape& shape, int n_samples);

/// Shoelace area; positive for counterclockwise vertex order.
double signed_area(const std::vector<TradeoffPoint>& polygon);

/// True when no two non-adjacent edges intersect.
bool is_simple_polygon(const std::vector<TradeoffPoint>& polygon);

}  // namespace lassodiag
