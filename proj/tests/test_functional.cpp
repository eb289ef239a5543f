#include <cmath>
#include <stdexcept>
#include <numbers>

#include "doctest.h"
#include "funcbell/functional.hpp"
#include "funcbell/lhv.hpp"

using namespace funcbell;
using std::numbers::pi;

TEST_CASE("threshold constants") {
  CHECK(threshold_visibility(Geometry::full_sphere) == 0.75);
  CHECK(threshold_visibility(Geometry::coplanar) == doctest::Approx(0.810569469).epsilon(1e-9));
  CHECK(thresholds::kGisin == doctest::Approx(0.785398).epsilon(1e-6));
  CHECK(thresholds::kChainedLimit == 1.0);
  CHECK(thresholds::kFullSphere < thresholds::kGisin);
  CHECK(thresholds::kGisin < thresholds::kCoplanar);
  CHECK(thresholds::kCoplanar < thresholds::kChainedLimit);
  CHECK(parse_geometry("sphere") == Geometry::full_sphere);
  CHECK(parse_geometry("coplanar") == Geometry::coplanar);
  CHECK_THROWS(parse_geometry("torus"));
}

TEST_CASE("full sphere reports") {
  const auto one = evaluate_inequality(Geometry::full_sphere, Visibility(1));
  CHECK(one.quantum_value == doctest::Approx(52.63789).epsilon(1e-7));
  CHECK(one.lhv_bound == doctest::Approx(49.34802).epsilon(1e-7));
  CHECK(one.margin == doctest::Approx(3.28987).epsilon(1e-6));
  CHECK(one.margin_ratio == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(one.violated);
  CHECK(one.quad_error_estimate < 1e-9);
  CHECK(one.grid_order == GridOrder{16, 32});

  const auto at = evaluate_inequality(Geometry::full_sphere, Visibility(0.75));
  CHECK(std::abs(at.margin) < 1e-10);
  CHECK_FALSE(at.violated);

  const auto half = evaluate_inequality(Geometry::full_sphere, Visibility(0.5));
  CHECK(half.margin < 0);
  CHECK_FALSE(half.violated);
}

TEST_CASE("margin is monotone on each side of the threshold") {
  for (auto g : {Geometry::full_sphere, Geometry::coplanar}) {
    const double t = threshold_visibility(g);
    double prev_margin = 0.0;
    double prev_v = -1.0;
    for (int i = 0; i <= 100; ++i) {
      const double v = i / 100.0;
      const auto r = evaluate_inequality(g, Visibility(v), {4, 8});
      if (v > t + 1e-12) CHECK(r.margin > 0);
      if (v < t - 1e-12 && v > 0) CHECK(r.margin < 0);
      if (prev_v >= 0) {
        // margin(v) = c2 v^2 - c1 v has its minimum at t / 2
        if (prev_v >= t / 2) CHECK(r.margin > prev_margin);
        if (v <= t / 2) CHECK(r.margin < prev_margin);
      }
      prev_margin = r.margin;
      prev_v = v;
    }
  }
}

TEST_CASE("analytic and numeric values agree at order (32, 64)") {
  for (double v : {0.3, 0.75, 1.0}) {
    const auto r = evaluate_inequality(Geometry::full_sphere, Visibility(v), {32, 64});
    const auto grid = build_grid(32, 64);
    CHECK(std::abs(norm_sq_qm_numeric(Visibility(v), grid) - r.quantum_value) <= r.quad_error_estimate + 1e-12);
    const auto best = LhvModel::single(ResponseStrategy::hemisphere(Direction(0, 0)),
                                       ResponseStrategy::hemisphere(Direction(pi, 0)));
    CHECK(std::abs(lhv_functional_value(best, Visibility(v), grid) - r.lhv_bound) <= r.quad_error_estimate + 1e-12);
  }
}

TEST_CASE("coplanar closed forms match the direct quadrature oracle") {
  const auto uniform = build_circle_grid(64);
  const auto split = build_circle_grid(64, CircleRule::split_gauss_legendre);
  for (double v : {0.0, 0.4, 0.8105694691387022, 1.0}) {
    const Visibility vis(v);
    CHECK(std::abs(coplanar_norm_sq_qm_numeric(vis, uniform) - pi * pi * (1 + v * v / 2)) < 1e-10);
    CHECK(std::abs(coplanar_lhv_value_numeric(vis, 0.0, pi, split) - (pi * pi + 4 * v)) < 1e-10);
    // aligned half circles give the opposite sign of the correlation term
    CHECK(std::abs(coplanar_lhv_value_numeric(vis, 0.0, 0.0, split) - (pi * pi - 4 * v)) < 1e-10);
  }
  // the value only depends on the angle between the two half-circle axes
  CHECK(coplanar_lhv_value_numeric(Visibility(1), 1.0, 1.0 + pi, build_circle_grid(256)) ==
        doctest::Approx(pi * pi + 4).epsilon(1e-4));
}

TEST_CASE("coplanar reports") {
  const double t = 8 / (pi * pi);
  const auto at = evaluate_coplanar(Visibility(t));
  CHECK(std::abs(at.margin) < 1e-9);
  CHECK_FALSE(at.violated);
  CHECK(at.geometry == Geometry::coplanar);
  CHECK(at.grid_order.n_theta == 0);
  CHECK(at.grid_order.n_phi == 64);

  const auto one = evaluate_coplanar(Visibility(1));
  CHECK(one.margin > 0);
  CHECK(one.violated);
  CHECK(one.margin_ratio == doctest::Approx(one.margin / (pi * pi)));

  CHECK(evaluate_coplanar(Visibility(0.75)).margin < 0);
  CHECK_THROWS(evaluate_coplanar(Visibility(1), 7));
}
