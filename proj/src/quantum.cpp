#include "funcbell/quantum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "funcbell/parallel.hpp"

namespace funcbell {

Visibility::Visibility(double v) : v_(v) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw std::invalid_argument("visibility " + std::to_string(v) + " outside [0, 1]");
  }
}

void check_outcome(int m) {
  if (m != -1 && m != 1) {
    throw std::invalid_argument("outcome " + std::to_string(m) + " is not -1 or +1");
  }
}

double p_qm(int m, int m_prime, const Direction& a, const Direction& b, Visibility v) {
  check_outcome(m);
  check_outcome(m_prime);
  return 0.25 * (1.0 - m * m_prime * v.value() * dot(a, b));
}

double correlation_qm(const Direction& a, const Direction& b, Visibility v) {
  return -v.value() * dot(a, b);
}

double norm_sq_qm_analytic(Visibility v) {
  const double two_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
  return two_pi_sq * (1.0 + v.value() * v.value() / 3.0);
}

double norm_sq_qm_numeric(Visibility v, const QuadratureGrid& grid) {
  const auto& nodes = grid.nodes();
  const auto& w = grid.weights();
  const std::size_t n = grid.size();
  std::vector<double> rows(n);
  parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> inner(n);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (int m : {-1, 1})
          for (int mp : {-1, 1}) {
            const double p = p_qm(m, mp, nodes[i], nodes[j], v);
            s += p * p;
          }
        inner[j] = w[j] * s;
      }
      rows[i] = w[i] * pairwise_sum(inner);
    }
  }, 16);
  return pairwise_sum(rows);
}

}  // namespace funcbell
