#pragma once

// Singlet-state predictions with reduced two-particle visibility.

#include "funcbell/sphere.hpp"

namespace funcbell {

/// Two-particle interference visibility, 0 <= v <= 1.
class Visibility {
 public:
  /// Throws std::invalid_argument outside [0, 1] or when non-finite.
  explicit Visibility(double v);
  double value() const { return v_; }
  operator double() const { return v_; }

 private:
  double v_;
};

/// Throws std::invalid_argument unless m is -1 or +1.
void check_outcome(int m);

/// P(m, m'; a, b) = (1 - m m' v a.b) / 4.
double p_qm(int m, int m_prime, const Direction& a, const Direction& b, Visibility v);

/// E(a, b) = -v a.b, the sum over outcomes of m m' P(m, m'; a, b).
double correlation_qm(const Direction& a, const Direction& b, Visibility v);

/// ||P_QM||^2 = (2 pi)^2 (1 + v^2 / 3).
double norm_sq_qm_analytic(Visibility v);

/// ||P_QM||^2 by double-sphere quadrature of sum_{m,m'} P_QM^2.
double norm_sq_qm_numeric(Visibility v, const QuadratureGrid& grid);

/// The quantum joint distribution as a callable probability field.
struct QuantumPrediction {
  Visibility v{1.0};
  double operator()(int m, int m_prime, const Direction& a, const Direction& b) const {
    return p_qm(m, m_prime, a, b, v);
  }
};

}  // namespace funcbell
