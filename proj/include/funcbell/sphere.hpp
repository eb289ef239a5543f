#pragma once

// Measurement directions on the unit sphere and the quadrature rules that
// stand in for the rotation-invariant measure dOmega = sin(theta) dtheta dphi.

#include <array>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace funcbell {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a);

/// A unit vector given by polar angle theta in [0, pi] and azimuth phi in
/// [0, 2 pi). The Cartesian components are computed once from the angles as
/// (sin t cos p, sin t sin p, cos t).
class Direction {
 public:
  /// The +z pole.
  Direction() : theta_(0.0), phi_(0.0), n_{0.0, 0.0, 1.0} {}

  /// Throws std::invalid_argument for non-finite input or theta outside
  /// [0, pi]. phi is reduced modulo 2 pi.
  Direction(double theta, double phi);

  /// Normalizes v and converts it to angles. Throws on a zero or non-finite
  /// vector.
  static Direction from_vector(const Vec3& v);

  double theta() const { return theta_; }
  double phi() const { return phi_; }
  const Vec3& cartesian() const { return n_; }
  double operator[](std::size_t k) const { return n_[k]; }

  Direction opposite() const;

  friend bool operator==(const Direction&, const Direction&) = default;

 private:
  double theta_;
  double phi_;
  Vec3 n_;
};

inline Direction make_direction(double theta, double phi) { return Direction(theta, phi); }

inline double dot(const Direction& a, const Direction& b) { return dot(a.cartesian(), b.cartesian()); }

/// Proper rotation stored as a row-major 3x3 orthogonal matrix.
class Rotation {
 public:
  Rotation();  // identity
  explicit Rotation(const std::array<Vec3, 3>& rows) : rows_(rows) {}

  static Rotation about_axis(const Vec3& axis, double angle);
  /// A rotation taking +z onto `target`.
  static Rotation taking_z_to(const Direction& target);
  /// Haar-distributed rotation from a uniformly random unit quaternion.
  static Rotation random(std::mt19937_64& rng);

  Vec3 apply(const Vec3& v) const;
  Direction apply(const Direction& d) const;
  Rotation inverse() const;
  Rotation operator*(const Rotation& rhs) const;

  const std::array<Vec3, 3>& rows() const { return rows_; }

 private:
  std::array<Vec3, 3> rows_;
};

enum class QuadratureRule {
  /// One Gauss-Legendre panel in cos(theta) over [-1, 1].
  gauss_legendre,
  /// Two Gauss-Legendre panels, [-1, 0] and [0, 1], so integrands with a
  /// kink on the equator are integrated at spectral accuracy.
  split_gauss_legendre,
};

std::string to_string(QuadratureRule rule);
QuadratureRule parse_quadrature_rule(const std::string& label);

struct GridOrder {
  int n_theta = 16;
  int n_phi = 32;

  GridOrder doubled() const { return {2 * n_theta, 2 * n_phi}; }
  friend bool operator==(const GridOrder&, const GridOrder&) = default;
};

/// Product rule on S^2: Gauss-Legendre in cos(theta) times the uniform
/// periodic rule in phi. Nodes are theta-major, then phi. For the split rule
/// each panel carries n_theta nodes, so the grid has 2 * n_theta * n_phi
/// nodes.
class QuadratureGrid {
 public:
  const std::vector<Direction>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }
  GridOrder order() const { return order_; }
  QuadratureRule rule() const { return rule_; }
  std::string label() const;

  /// The same rule with every node rotated by r. Weights are unchanged
  /// because dOmega is rotation invariant.
  QuadratureGrid rotated(const Rotation& r) const;

  /// Index of the node closest to d (largest dot product, lowest index on ties).
  std::size_t nearest_node(const Direction& d) const;

 private:
  friend QuadratureGrid build_grid(int, int, QuadratureRule);
  std::vector<Direction> nodes_;
  std::vector<double> weights_;
  GridOrder order_;
  QuadratureRule rule_ = QuadratureRule::split_gauss_legendre;
};

/// Requires n_theta >= 2 and n_phi >= 4; throws std::invalid_argument otherwise.
QuadratureGrid build_grid(int n_theta, int n_phi,
                          QuadratureRule rule = QuadratureRule::split_gauss_legendre);
inline QuadratureGrid build_grid(GridOrder order,
                                 QuadratureRule rule = QuadratureRule::split_gauss_legendre) {
  return build_grid(order.n_theta, order.n_phi, rule);
}

using SphereFunction = std::function<double(const Direction&)>;

/// Sum of w_i f(node_i). f is evaluated concurrently and must be pure.
/// A non-finite value raises std::domain_error naming the first offending node.
double integrate(const SphereFunction& f, const QuadratureGrid& grid);

/// Weighted sum over values already tabulated on the grid nodes.
double integrate_values(const std::vector<double>& values, const QuadratureGrid& grid);

/// Equatorial rule for coplanar settings: nodes at theta = pi/2, weights sum
/// to 2 pi.
enum class CircleRule {
  /// phi_j = 2 pi j / n.
  uniform,
  /// Two Gauss-Legendre panels in phi, [-pi/2, pi/2] and [pi/2, 3 pi/2],
  /// with n/2 nodes each. Kinks of sign(cos phi) sit on the panel edges.
  split_gauss_legendre,
};

struct CircleGrid {
  std::vector<Direction> nodes;
  std::vector<double> weights;
  int n_phi = 0;
  CircleRule rule = CircleRule::uniform;
};

/// Requires n_phi >= 8 (and even for the split rule).
CircleGrid build_circle_grid(int n_phi, CircleRule rule = CircleRule::uniform);

/// Uniformly distributed direction (cos theta and phi uniform).
Direction random_direction(std::mt19937_64& rng);

}  // namespace funcbell
