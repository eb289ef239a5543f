#include "funcbell/functional.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "funcbell/lhv.hpp"
#include "funcbell/parallel.hpp"

namespace funcbell {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPiSq = 4.0 * kPi * kPi;

// Sum over i, j of w_i w_j pair(i, j), reduced row by row in index order.
template <class Pair>
double double_sum(const std::vector<double>& w, Pair&& pair) {
  const std::size_t n = w.size();
  std::vector<double> rows(n);
  parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> inner(n);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) inner[j] = w[j] * pair(i, j);
      rows[i] = w[i] * pairwise_sum(inner);
    }
  }, 16);
  return pairwise_sum(rows);
}

}  // namespace

std::string to_string(Geometry g) { return g == Geometry::full_sphere ? "full-sphere" : "coplanar"; }

Geometry parse_geometry(const std::string& s) {
  if (s == "sphere" || s == "full-sphere" || s == "full_sphere") return Geometry::full_sphere;
  if (s == "coplanar") return Geometry::coplanar;
  throw std::invalid_argument("unknown geometry '" + s + "' (expected sphere or coplanar)");
}

double threshold_visibility(Geometry g) {
  // sphere: v^2 / 3 = v / 4; circle: pi^2 v^2 / 2 = 4 v.
  return g == Geometry::full_sphere ? thresholds::kFullSphere : thresholds::kCoplanar;
}

double coplanar_norm_sq_qm_analytic(Visibility v) { return kPi * kPi * (1.0 + v.value() * v.value() / 2.0); }

double coplanar_lhv_bound_analytic(Visibility v) { return kPi * kPi + 4.0 * v.value(); }

double coplanar_norm_sq_qm_numeric(Visibility v, const CircleGrid& grid) {
  return double_sum(grid.weights, [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (int m : {-1, 1})
      for (int mp : {-1, 1}) {
        const double p = p_qm(m, mp, grid.nodes[i], grid.nodes[j], v);
        s += p * p;
      }
    return s;
  });
}

double coplanar_lhv_value_numeric(Visibility v, double axis_a, double axis_b, const CircleGrid& grid) {
  const LhvModel model = LhvModel::single(ResponseStrategy::hemisphere(Direction(kPi / 2, axis_a)),
                                          ResponseStrategy::hemisphere(Direction(kPi / 2, axis_b)));
  const std::size_t n = grid.nodes.size();
  std::vector<double> ia(n), ib(n);
  for (std::size_t i = 0; i < n; ++i) {
    ia[i] = model.members()[0].side_a.evaluate(grid.nodes[i]);
    ib[i] = model.members()[0].side_b.evaluate(grid.nodes[i]);
  }
  return double_sum(grid.weights, [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (int m : {-1, 1})
      for (int mp : {-1, 1}) {
        s += p_qm(m, mp, grid.nodes[i], grid.nodes[j], v) * 0.25 * (1.0 + m * ia[i]) * (1.0 + mp * ib[j]);
      }
    return s;
  });
}

namespace {

void finish(InequalityReport& r, double constant_term) {
  r.margin = r.quantum_value - r.lhv_bound;
  r.margin_ratio = r.margin / constant_term;
  r.violated = r.margin > r.quad_error_estimate;
}

}  // namespace

InequalityReport evaluate_inequality(Geometry g, Visibility v, GridOrder order) {
  if (g == Geometry::coplanar) return evaluate_coplanar(v, order.n_phi);

  InequalityReport r;
  r.geometry = g;
  r.v = v.value();
  r.quantum_value = norm_sq_qm_analytic(v);
  r.lhv_bound = lhv_bound_analytic(v);
  r.threshold_v = threshold_visibility(g);
  r.grid_order = order;

  const auto grid = build_grid(order);
  const auto fine = build_grid(order.doubled());
  const double q = norm_sq_qm_numeric(v, grid);
  const double q_fine = norm_sq_qm_numeric(v, fine);
  const auto best = LhvModel::single(ResponseStrategy::hemisphere(Direction(0, 0)),
                                     ResponseStrategy::hemisphere(Direction(kPi, 0)));
  const double h = lhv_functional_value(best, v, grid);
  const double h_fine = lhv_functional_value(best, v, fine);
  r.quad_error_estimate = std::max({std::abs(q - r.quantum_value), std::abs(q - q_fine),
                                    std::abs(h - r.lhv_bound), std::abs(h - h_fine)});
  finish(r, kTwoPiSq);
  return r;
}

InequalityReport evaluate_coplanar(Visibility v, int n_phi) {
  if (n_phi < 8) throw std::invalid_argument("evaluate_coplanar: n_phi must be >= 8");
  InequalityReport r;
  r.geometry = Geometry::coplanar;
  r.v = v.value();
  r.quantum_value = coplanar_norm_sq_qm_analytic(v);
  r.lhv_bound = coplanar_lhv_bound_analytic(v);
  r.threshold_v = threshold_visibility(Geometry::coplanar);
  r.grid_order = {0, n_phi};

  const int even = n_phi + (n_phi % 2);
  const double q = coplanar_norm_sq_qm_numeric(v, build_circle_grid(n_phi));
  const double q_fine = coplanar_norm_sq_qm_numeric(v, build_circle_grid(2 * n_phi));
  const auto split = build_circle_grid(even, CircleRule::split_gauss_legendre);
  const auto split_fine = build_circle_grid(2 * even, CircleRule::split_gauss_legendre);
  const double h = coplanar_lhv_value_numeric(v, 0.0, kPi, split);
  const double h_fine = coplanar_lhv_value_numeric(v, 0.0, kPi, split_fine);
  r.quad_error_estimate = std::max({std::abs(q - r.quantum_value), std::abs(q - q_fine),
                                    std::abs(h - r.lhv_bound), std::abs(h - h_fine)});
  finish(r, kPi * kPi);
  return r;
}

}  // namespace funcbell
