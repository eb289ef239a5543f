#include "funcbell/sphere.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "funcbell/parallel.hpp"

namespace funcbell {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct GlTableDeleter {
  void operator()(gsl_integration_glfixed_table* t) const { gsl_integration_glfixed_table_free(t); }
};

// Gauss-Legendre nodes/weights mapped onto [lo, hi], ascending.
void gauss_legendre(std::size_t n, double lo, double hi, std::vector<double>& x,
                    std::vector<double>& w) {
  std::unique_ptr<gsl_integration_glfixed_table, GlTableDeleter> table(
      gsl_integration_glfixed_table_alloc(n));
  if (!table) throw std::runtime_error("gauss_legendre: table allocation failed");
  x.resize(n);
  w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(lo, hi, i, &x[i], &w[i], table.get());
  }
  // GSL orders points symmetrically from the centre; sort for a fixed layout.
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> xs(n), ws(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[idx[i]];
    ws[i] = w[idx[i]];
  }
  x = std::move(xs);
  w = std::move(ws);
}

}  // namespace

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Direction::Direction(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw std::invalid_argument("Direction: non-finite angle");
  }
  if (theta < 0.0 || theta > kPi) {
    std::ostringstream msg;
    msg << "Direction: theta=" << theta << " outside [0, pi]";
    throw std::invalid_argument(msg.str());
  }
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
  theta_ = theta;
  phi_ = phi;
  const double st = std::sin(theta);
  n_ = {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

Direction Direction::from_vector(const Vec3& v) {
  const double r = norm(v);
  if (!std::isfinite(r) || r == 0.0) {
    throw std::invalid_argument("Direction::from_vector: zero or non-finite vector");
  }
  const double z = std::clamp(v[2] / r, -1.0, 1.0);
  return Direction(std::acos(z), std::atan2(v[1], v[0]));
}

Direction Direction::opposite() const {
  return Direction::from_vector({-n_[0], -n_[1], -n_[2]});
}

Rotation::Rotation() : rows_{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}} {}

Rotation Rotation::about_axis(const Vec3& axis, double angle) {
  const double r = norm(axis);
  if (r == 0.0) return Rotation();
  const double x = axis[0] / r, y = axis[1] / r, z = axis[2] / r;
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  return Rotation({{{t * x * x + c, t * x * y - s * z, t * x * z + s * y},
                    {t * x * y + s * z, t * y * y + c, t * y * z - s * x},
                    {t * x * z - s * y, t * y * z + s * x, t * z * z + c}}});
}

Rotation Rotation::taking_z_to(const Direction& target) {
  // Rz(phi) * Ry(theta) maps +z to (sin t cos p, sin t sin p, cos t).
  return about_axis({0, 0, 1}, target.phi()) * about_axis({0, 1, 0}, target.theta());
}

Rotation Rotation::random(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  double q[4];
  double r = 0.0;
  do {
    r = 0.0;
    for (double& c : q) {
      c = gauss(rng);
      r += c * c;
    }
  } while (r < 1e-12);
  r = std::sqrt(r);
  const double w = q[0] / r, x = q[1] / r, y = q[2] / r, z = q[3] / r;
  return Rotation({{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
                    {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
                    {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}});
}

Vec3 Rotation::apply(const Vec3& v) const {
  return {dot(rows_[0], v), dot(rows_[1], v), dot(rows_[2], v)};
}

Direction Rotation::apply(const Direction& d) const { return Direction::from_vector(apply(d.cartesian())); }

Rotation Rotation::inverse() const {
  std::array<Vec3, 3> t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = rows_[j][i];
  return Rotation(t);
}

Rotation Rotation::operator*(const Rotation& rhs) const {
  std::array<Vec3, 3> out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] += rows_[i][k] * rhs.rows_[k][j];
  return Rotation(out);
}

std::string to_string(QuadratureRule rule) {
  switch (rule) {
    case QuadratureRule::gauss_legendre:
      return "gauss-legendre";
    case QuadratureRule::split_gauss_legendre:
      return "split-gauss-legendre";
  }
  return "unknown";
}

QuadratureRule parse_quadrature_rule(const std::string& label) {
  if (label == "gauss-legendre") return QuadratureRule::gauss_legendre;
  if (label == "split-gauss-legendre" || label == "split") return QuadratureRule::split_gauss_legendre;
  throw std::invalid_argument("unknown quadrature rule '" + label + "'");
}

std::string QuadratureGrid::label() const {
  std::ostringstream s;
  s << to_string(rule_) << "(" << order_.n_theta << "," << order_.n_phi << ")";
  return s.str();
}

QuadratureGrid QuadratureGrid::rotated(const Rotation& r) const {
  QuadratureGrid out = *this;
  for (auto& n : out.nodes_) n = r.apply(n);
  return out;
}

std::size_t QuadratureGrid::nearest_node(const Direction& d) const {
  std::size_t best = 0;
  double best_dot = -2.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double c = dot(nodes_[i], d);
    if (c > best_dot) {
      best_dot = c;
      best = i;
    }
  }
  return best;
}

QuadratureGrid build_grid(int n_theta, int n_phi, QuadratureRule rule) {
  if (n_theta < 2 || n_phi < 4) {
    std::ostringstream msg;
    msg << "build_grid: order (" << n_theta << ", " << n_phi << ") below minimum (2, 4)";
    throw std::invalid_argument(msg.str());
  }
  std::vector<double> u, wu;
  if (rule == QuadratureRule::gauss_legendre) {
    gauss_legendre(static_cast<std::size_t>(n_theta), -1.0, 1.0, u, wu);
  } else {
    std::vector<double> u_lo, w_lo, u_hi, w_hi;
    gauss_legendre(static_cast<std::size_t>(n_theta), -1.0, 0.0, u_lo, w_lo);
    gauss_legendre(static_cast<std::size_t>(n_theta), 0.0, 1.0, u_hi, w_hi);
    u = u_lo;
    u.insert(u.end(), u_hi.begin(), u_hi.end());
    wu = w_lo;
    wu.insert(wu.end(), w_hi.begin(), w_hi.end());
  }

  QuadratureGrid grid;
  grid.order_ = {n_theta, n_phi};
  grid.rule_ = rule;
  const double w_phi = kTwoPi / n_phi;
  grid.nodes_.reserve(u.size() * static_cast<std::size_t>(n_phi));
  grid.weights_.reserve(grid.nodes_.capacity());
  // Descending cos(theta) gives ascending theta.
  for (std::size_t i = u.size(); i-- > 0;) {
    const double theta = std::acos(u[i]);
    for (int j = 0; j < n_phi; ++j) {
      grid.nodes_.emplace_back(theta, w_phi * j);
      grid.weights_.push_back(wu[i] * w_phi);
    }
  }
  return grid;
}

double integrate_values(const std::vector<double>& values, const QuadratureGrid& grid) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("integrate_values: value count does not match grid size");
  }
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      std::ostringstream msg;
      msg << "integrate: non-finite integrand " << values[i] << " at node " << i << " (theta="
          << grid.nodes()[i].theta() << ", phi=" << grid.nodes()[i].phi() << ")";
      throw std::domain_error(msg.str());
    }
    terms[i] = grid.weights()[i] * values[i];
  }
  return pairwise_sum(terms);
}

double integrate(const SphereFunction& f, const QuadratureGrid& grid) {
  std::vector<double> values(grid.size());
  parallel_blocks(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = f(grid.nodes()[i]);
  }, 256);
  return integrate_values(values, grid);
}

CircleGrid build_circle_grid(int n_phi, CircleRule rule) {
  if (n_phi < 8) throw std::invalid_argument("build_circle_grid: n_phi must be >= 8");
  CircleGrid out;
  out.n_phi = n_phi;
  out.rule = rule;
  const double equator = kPi / 2;
  if (rule == CircleRule::uniform) {
    const double w = kTwoPi / n_phi;
    for (int j = 0; j < n_phi; ++j) {
      out.nodes.emplace_back(equator, w * j);
      out.weights.push_back(w);
    }
    return out;
  }
  if (n_phi % 2 != 0) throw std::invalid_argument("build_circle_grid: split rule needs even n_phi");
  std::vector<double> x, w;
  for (double lo : {-kPi / 2, kPi / 2}) {
    gauss_legendre(static_cast<std::size_t>(n_phi / 2), lo, lo + kPi, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
      out.nodes.emplace_back(equator, x[i]);
      out.weights.push_back(w[i]);
    }
  }
  return out;
}

Direction random_direction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = 2.0 * unit(rng) - 1.0;
  const double phi = kTwoPi * unit(rng);
  return Direction(std::acos(std::clamp(u, -1.0, 1.0)), phi);
}

}  // namespace funcbell
