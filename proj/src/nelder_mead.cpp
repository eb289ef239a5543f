#include "funcbell/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace funcbell {

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0) throw std::invalid_argument("nelder_mead: empty parameter vector");

  NelderMeadResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    return f(x);
  };

  std::vector<std::vector<double>> simplex(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += options.initial_step;
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);

  auto along = [&](double t, std::vector<double>& out) {
    const auto& worst = simplex[order[dim]];
    for (std::size_t k = 0; k < dim; ++k) out[k] = centroid[k] + t * (worst[k] - centroid[k]);
  };

  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    double size = 0.0;
    for (std::size_t i = 1; i <= dim; ++i)
      size = std::max(size, distance(simplex[order[0]], simplex[order[i]]));
    result.simplex_size = size;
    const double spread = values[order[dim]] - values[order[0]];
    if (size < options.x_tolerance && spread <= options.f_tolerance) {
      result.converged = true;
      break;
    }
    if (result.evaluations >= options.max_evaluations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[order[i]][k] / double(dim);

    const std::size_t worst = order[dim];
    const double f_best = values[order[0]];
    const double f_second = values[order[dim - 1]];

    along(-1.0, trial);
    const double f_reflect = eval(trial);
    if (f_reflect < f_best) {
      along(-2.0, trial2);
      const double f_expand = eval(trial2);
      if (f_expand < f_reflect) {
        simplex[worst] = trial2;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < f_second) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }
    const bool outside = f_reflect < values[worst];
    along(outside ? -0.5 : 0.5, trial2);
    const double f_contract = eval(trial2);
    if (f_contract < (outside ? f_reflect : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = f_contract;
      continue;
    }
    const auto best = simplex[order[0]];
    for (std::size_t i = 1; i <= dim; ++i) {
      auto& v = simplex[order[i]];
      for (std::size_t k = 0; k < dim; ++k) v[k] = best[k] + 0.5 * (v[k] - best[k]);
      values[order[i]] = eval(v);
    }
  }

  result.x = simplex[order[0]];
  result.value = values[order[0]];
  return result;
}

}  // namespace funcbell
