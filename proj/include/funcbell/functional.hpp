#pragma once

// The functional Bell inequality: ||P_QM||^2 against the largest value any
// local hidden variable model can reach, for settings on the whole sphere or
// restricted to a great circle.

#include <numbers>
#include <optional>
#include <string>

#include "funcbell/quantum.hpp"
#include "funcbell/sphere.hpp"

namespace funcbell {

enum class Geometry { full_sphere, coplanar };

std::string to_string(Geometry g);
/// Accepts "sphere", "full-sphere", "coplanar".
Geometry parse_geometry(const std::string& s);

namespace thresholds {
inline constexpr double kFullSphere = 0.75;
inline constexpr double kCoplanar = 8.0 / (std::numbers::pi * std::numbers::pi);
/// Gisin's many-setting inequalities.
inline constexpr double kGisin = std::numbers::pi / 4.0;
/// Chained inequalities in the limit of infinitely many settings.
inline constexpr double kChainedLimit = 1.0;
}  // namespace thresholds

/// Critical visibility: the v where the quantum v^2 term equals the LHV v term.
double threshold_visibility(Geometry g);

struct InequalityReport {
  Geometry geometry = Geometry::full_sphere;
  double v = 0.0;
  double quantum_value = 0.0;
  double lhv_bound = 0.0;
  std::optional<double> lhv_best_found;
  double margin = 0.0;
  /// margin divided by the geometry's constant term ((2 pi)^2 or pi^2).
  double margin_ratio = 0.0;
  double threshold_v = 0.0;
  /// (n_theta, n_phi); coplanar reports carry n_theta = 0.
  GridOrder grid_order;
  double quad_error_estimate = 0.0;
  /// margin exceeds the quadrature error estimate.
  bool violated = false;
};

/// Coplanar closed forms, settings on the equator with measure dphi:
/// ||P_QM||^2 = pi^2 (1 + v^2 / 2) and the LHV bound pi^2 + 4 v.
double coplanar_norm_sq_qm_analytic(Visibility v);
double coplanar_lhv_bound_analytic(Visibility v);

/// ||P_QM||^2 on a circle rule by direct double quadrature.
double coplanar_norm_sq_qm_numeric(Visibility v, const CircleGrid& grid);
/// <P_QM | P_HV> for half-circle sign strategies sign(cos(phi - axis)) on each
/// side, by direct double quadrature. Anti-aligned axes (axis_b = axis_a + pi)
/// reach the bound.
double coplanar_lhv_value_numeric(Visibility v, double axis_a, double axis_b, const CircleGrid& grid);

/// Analytic quantum value and bound; the quadrature cross-check at `order`
/// and 2 * order feeds quad_error_estimate.
InequalityReport evaluate_inequality(Geometry g, Visibility v, GridOrder order = {});

/// Requires n_phi >= 8.
InequalityReport evaluate_coplanar(Visibility v, int n_phi = 64);

}  // namespace funcbell
