#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace funcbell {

struct NelderMeadOptions {
  int max_evaluations = 1000;
  double initial_step = 0.5;
  /// Stop when the simplex diameter and the spread of objective values both
  /// fall below these.
  double x_tolerance = 1e-10;
  double f_tolerance = 1e-14;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  /// Largest distance from the best vertex to any other vertex at exit.
  double simplex_size = 0.0;
  bool converged = false;
};

/// Minimizes f with the standard reflection / expansion / contraction /
/// shrink moves (coefficients 1, 2, 1/2, 1/2). Deterministic for a given start.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& options = {});

}  // namespace funcbell
