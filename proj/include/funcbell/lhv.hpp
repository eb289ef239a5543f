#pragma once

// Local hidden variable side: local response functions I(n) in [-1, 1],
// their projections onto the span of the normalized coordinate functions
// sqrt(3 / 4 pi) n_k, and the bound those projections imply.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "funcbell/quantum.hpp"
#include "funcbell/sphere.hpp"

namespace funcbell {

/// Deterministic local response I: S^2 -> [-1, 1].
class ResponseStrategy {
 public:
  enum class Kind { hemisphere, linear, harmonic, tabulated };

  /// I(n) = sign(c.n), with sign(0) = +1.
  static ResponseStrategy hemisphere(const Direction& axis);
  /// I(n) = c.n.
  static ResponseStrategy linear(const Direction& axis);
  /// I(n) = clip(sum_j coeffs[j] * monomial_j(n), -1, 1) over the Cartesian
  /// monomials n1^i n2^j n3^k with i + j + k <= degree, see harmonic_monomials().
  static ResponseStrategy harmonic(int degree, std::vector<double> coeffs);
  /// Values given at the nodes of `grid`; other points take the value of the
  /// nearest node. Values are clipped to [-1, 1] at evaluation.
  static ResponseStrategy tabulated(std::shared_ptr<const QuadratureGrid> grid,
                                    std::vector<double> values);
  static ResponseStrategy constant(double value) { return harmonic(0, {value}); }

  Kind kind() const;
  std::string describe() const;

  /// Admissible (clipped) response.
  double evaluate(const Direction& n) const;
  /// Response before clipping.
  double raw(const Direction& n) const;
  /// max(|raw| - 1, 0) over the grid nodes: how far the unclipped function
  /// leaves the admissible range.
  double clip_violation(const QuadratureGrid& grid) const;

  /// Axis for strategies that depend on n only through c.n.
  std::optional<Direction> symmetry_axis() const;

  /// Same strategy applied in a rotated frame: I'(n) = I(R^T n).
  /// Supported for hemisphere and linear strategies.
  ResponseStrategy rotated(const Rotation& r) const;

  int harmonic_degree() const;
  const std::vector<double>& harmonic_coefficients() const;

 private:
  struct Hemisphere {
    Direction axis;
  };
  struct Linear {
    Direction axis;
  };
  struct Harmonic {
    int degree;
    std::vector<double> coeffs;
    std::vector<std::array<int, 3>> monomials;
  };
  struct Tabulated {
    std::shared_ptr<const QuadratureGrid> grid;
    std::vector<double> values;
  };
  using Repr = std::variant<Hemisphere, Linear, Harmonic, Tabulated>;
  explicit ResponseStrategy(Repr r) : repr_(std::move(r)) {}
  Repr repr_;
};

/// Exponent triples (i, j, k), i + j + k <= degree, ordered by total degree
/// then lexicographically descending in i, then j.
std::vector<std::array<int, 3>> harmonic_monomials(int degree);

/// alpha_k = sqrt(3 / 4 pi) * integral of I(n) n_k dOmega.
struct ProjectionCoefficients {
  Vec3 alpha{};
  double norm() const { return funcbell::norm(alpha); }
};

/// sqrt(3 pi) = 2 pi sqrt(3 / 4 pi), the largest possible projection norm.
double projection_norm_bound();

/// Projection of I onto the span of sqrt(3 / 4 pi) n_k using `grid`.
/// Strategies with a symmetry axis are integrated on the grid rotated so that
/// its pole lies on that axis; the integrand then only varies with the polar
/// angle and its kink sits on the split rule's panel boundary.
ProjectionCoefficients project(const ResponseStrategy& strategy, const QuadratureGrid& grid);

/// Finite hidden-variable ensemble: P(m, m'; a, b) = sum w (1 + m I_a(a))/2 (1 + m' I_b(b))/2.
class LhvModel {
 public:
  struct Member {
    double weight;
    ResponseStrategy side_a;
    ResponseStrategy side_b;
  };

  /// Throws std::invalid_argument for negative weights, an empty ensemble,
  /// or weights not summing to 1 within 1e-12.
  explicit LhvModel(std::vector<Member> members);
  static LhvModel single(ResponseStrategy a, ResponseStrategy b);

  const std::vector<Member>& members() const { return members_; }
  double joint_probability(int m, int m_prime, const Direction& a, const Direction& b) const;

 private:
  std::vector<Member> members_;
};

/// <P_QM | P_HV> = (2 pi)^2 - sum_lambda w (v pi / 3) alpha^a . alpha^b.
/// The maximum (2 pi)^2 (1 + v / 4) is reached by anti-aligned hemispheres.
double lhv_functional_value(const LhvModel& model, Visibility v, const QuadratureGrid& grid);

/// <P_QM | P_HV> by direct quadrature over both spheres and all four outcome
/// pairs, evaluating the model's joint probabilities pointwise. O(N^2).
double lhv_functional_value_direct(const LhvModel& model, Visibility v, const QuadratureGrid& grid);

/// (2 pi)^2 (1 + v / 4).
double lhv_bound_analytic(Visibility v);

struct StrategyFamily {
  enum class Kind { hemisphere_pair, harmonic };
  Kind kind = Kind::hemisphere_pair;
  int degree = 1;  // harmonic only

  static StrategyFamily hemisphere_pair() { return {Kind::hemisphere_pair, 0}; }
  static StrategyFamily harmonic(int degree) { return {Kind::harmonic, degree}; }
  std::string describe() const;
};

struct OptimizeResult {
  LhvModel model;
  double value;
  int evaluations;
  /// Simplex diameter of the winning restart at exit; large values mean the
  /// budget ran out before convergence.
  double final_simplex_size;
  bool converged;
  int restarts;
  /// |value - value of the same model on the doubled grid|.
  double grid_error;
};

inline constexpr int kOptimizeRestarts = 3;

/// Derivative-free maximization of lhv_functional_value over one family of
/// single-pair models. Runs kOptimizeRestarts Nelder-Mead searches from
/// seeded random starts with the budget split evenly; keeps the best.
/// Clipped harmonics are integrated on the grid as given, so the search can
/// exploit quadrature error; grid_error reports its size.
/// Throws std::invalid_argument when budget < 100.
OptimizeResult optimize_lhv(Visibility v, const StrategyFamily& family, const QuadratureGrid& grid,
                            int budget, std::uint64_t seed);

}  // namespace funcbell
