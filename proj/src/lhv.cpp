#include "funcbell/lhv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "funcbell/nelder_mead.hpp"
#include "funcbell/parallel.hpp"

namespace funcbell {

namespace {

constexpr double kPi = std::numbers::pi;
const double kBasisNorm = std::sqrt(3.0 / (4.0 * kPi));

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

double clip_unit(double x) { return std::clamp(x, -1.0, 1.0); }

Direction direction_from_angles(double theta, double phi) {
  const double st = std::sin(theta);
  return Direction::from_vector({st * std::cos(phi), st * std::sin(phi), std::cos(theta)});
}

}  // namespace

std::vector<std::array<int, 3>> harmonic_monomials(int degree) {
  if (degree < 0) throw std::invalid_argument("harmonic degree must be >= 0");
  std::vector<std::array<int, 3>> out;
  for (int total = 0; total <= degree; ++total)
    for (int i = total; i >= 0; --i)
      for (int j = total - i; j >= 0; --j) out.push_back({i, j, total - i - j});
  return out;
}

ResponseStrategy ResponseStrategy::hemisphere(const Direction& axis) { return ResponseStrategy(Hemisphere{axis}); }

ResponseStrategy ResponseStrategy::linear(const Direction& axis) { return ResponseStrategy(Linear{axis}); }

ResponseStrategy ResponseStrategy::harmonic(int degree, std::vector<double> coeffs) {
  auto monomials = harmonic_monomials(degree);
  const auto expected = monomials.size();
  if (coeffs.size() != expected) {
    std::ostringstream msg;
    msg << "harmonic strategy of degree " << degree << " needs " << expected
        << " coefficients, got " << coeffs.size();
    throw std::invalid_argument(msg.str());
  }
  for (double c : coeffs)
    if (!std::isfinite(c)) throw std::invalid_argument("harmonic strategy: non-finite coefficient");
  return ResponseStrategy(Harmonic{degree, std::move(coeffs), std::move(monomials)});
}

ResponseStrategy ResponseStrategy::tabulated(std::shared_ptr<const QuadratureGrid> grid,
                                             std::vector<double> values) {
  if (!grid) throw std::invalid_argument("tabulated strategy: null grid");
  if (values.size() != grid->size()) {
    throw std::invalid_argument("tabulated strategy: value count does not match grid size");
  }
  for (double x : values)
    if (!std::isfinite(x)) throw std::invalid_argument("tabulated strategy: non-finite value");
  return ResponseStrategy(Tabulated{std::move(grid), std::move(values)});
}

ResponseStrategy::Kind ResponseStrategy::kind() const {
  return std::visit(overloaded{[](const Hemisphere&) { return Kind::hemisphere; },
                               [](const Linear&) { return Kind::linear; },
                               [](const Harmonic&) { return Kind::harmonic; },
                               [](const Tabulated&) { return Kind::tabulated; }},
                    repr_);
}

std::string ResponseStrategy::describe() const {
  std::ostringstream s;
  s.precision(17);
  std::visit(overloaded{[&](const Hemisphere& h) {
                          s << "hemisphere(theta=" << h.axis.theta() << ",phi=" << h.axis.phi() << ")";
                        },
                        [&](const Linear& l) {
                          s << "linear(theta=" << l.axis.theta() << ",phi=" << l.axis.phi() << ")";
                        },
                        [&](const Harmonic& h) {
                          s << "harmonic(L=" << h.degree << ";";
                          for (std::size_t i = 0; i < h.coeffs.size(); ++i) s << (i ? "," : "") << h.coeffs[i];
                          s << ")";
                        },
                        [&](const Tabulated& t) { s << "tabulated(" << t.grid->label() << ")"; }},
             repr_);
  return s.str();
}

double ResponseStrategy::raw(const Direction& n) const {
  return std::visit(overloaded{[&](const Hemisphere& h) { return dot(h.axis, n) >= 0.0 ? 1.0 : -1.0; },
                               [&](const Linear& l) { return dot(l.axis, n); },
                               [&](const Harmonic& h) {
                                 double s = 0.0;
                                 for (std::size_t i = 0; i < h.monomials.size(); ++i) {
                                   const auto& e = h.monomials[i];
                                   s += h.coeffs[i] * ipow(n[0], e[0]) * ipow(n[1], e[1]) * ipow(n[2], e[2]);
                                 }
                                 return s;
                               },
                               [&](const Tabulated& t) { return t.values[t.grid->nearest_node(n)]; }},
                    repr_);
}

double ResponseStrategy::evaluate(const Direction& n) const { return clip_unit(raw(n)); }

double ResponseStrategy::clip_violation(const QuadratureGrid& grid) const {
  double worst = 0.0;
  for (const auto& n : grid.nodes()) worst = std::max(worst, std::abs(raw(n)) - 1.0);
  return worst;
}

std::optional<Direction> ResponseStrategy::symmetry_axis() const {
  if (const auto* h = std::get_if<Hemisphere>(&repr_)) return h->axis;
  if (const auto* l = std::get_if<Linear>(&repr_)) return l->axis;
  return std::nullopt;
}

ResponseStrategy ResponseStrategy::rotated(const Rotation& r) const {
  if (const auto* h = std::get_if<Hemisphere>(&repr_)) return hemisphere(r.apply(h->axis));
  if (const auto* l = std::get_if<Linear>(&repr_)) return linear(r.apply(l->axis));
  throw std::invalid_argument("ResponseStrategy::rotated: only axial strategies can be rotated");
}

int ResponseStrategy::harmonic_degree() const {
  if (const auto* h = std::get_if<Harmonic>(&repr_)) return h->degree;
  throw std::logic_error("not a harmonic strategy");
}

const std::vector<double>& ResponseStrategy::harmonic_coefficients() const {
  if (const auto* h = std::get_if<Harmonic>(&repr_)) return h->coeffs;
  throw std::logic_error("not a harmonic strategy");
}

double projection_norm_bound() { return 2.0 * kPi * kBasisNorm; }

namespace {

ProjectionCoefficients project_values(const std::vector<double>& values, const QuadratureGrid& grid) {
  ProjectionCoefficients out;
  std::vector<double> terms(grid.size());
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) terms[i] = values[i] * grid.nodes()[i][k];
    out.alpha[k] = kBasisNorm * integrate_values(terms, grid);
  }
  return out;
}

std::vector<double> tabulate(const ResponseStrategy& s, const QuadratureGrid& grid) {
  std::vector<double> values(grid.size());
  parallel_blocks(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = s.evaluate(grid.nodes()[i]);
  }, 256);
  return values;
}

}  // namespace

ProjectionCoefficients project(const ResponseStrategy& strategy, const QuadratureGrid& grid) {
  if (const auto axis = strategy.symmetry_axis()) {
    const QuadratureGrid aligned = grid.rotated(Rotation::taking_z_to(*axis));
    return project_values(tabulate(strategy, aligned), aligned);
  }
  return project_values(tabulate(strategy, grid), grid);
}

LhvModel::LhvModel(std::vector<Member> members) : members_(std::move(members)) {
  if (members_.empty()) throw std::invalid_argument("LhvModel: empty ensemble");
  double total = 0.0;
  for (const auto& m : members_) {
    if (!(m.weight >= 0.0)) throw std::invalid_argument("LhvModel: negative weight");
    total += m.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "LhvModel: weights sum to " << total << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
}

LhvModel LhvModel::single(ResponseStrategy a, ResponseStrategy b) {
  return LhvModel({Member{1.0, std::move(a), std::move(b)}});
}

double LhvModel::joint_probability(int m, int m_prime, const Direction& a, const Direction& b) const {
  check_outcome(m);
  check_outcome(m_prime);
  double p = 0.0;
  for (const auto& mem : members_) {
    p += mem.weight * 0.25 * (1.0 + m * mem.side_a.evaluate(a)) * (1.0 + m_prime * mem.side_b.evaluate(b));
  }
  return p;
}

double lhv_functional_value(const LhvModel& model, Visibility v, const QuadratureGrid& grid) {
  const double constant = 4.0 * kPi * kPi;
  double correlation = 0.0;
  for (const auto& mem : model.members()) {
    const auto alpha_a = project(mem.side_a, grid);
    const auto alpha_b = project(mem.side_b, grid);
    correlation += mem.weight * dot(alpha_a.alpha, alpha_b.alpha);
  }
  // The singlet anti-correlation enters with a minus sign.
  return constant - v.value() * kPi / 3.0 * correlation;
}

double lhv_functional_value_direct(const LhvModel& model, Visibility v, const QuadratureGrid& grid) {
  const auto& nodes = grid.nodes();
  const auto& w = grid.weights();
  const std::size_t n = grid.size();
  const std::size_t n_members = model.members().size();

  std::vector<std::vector<double>> resp_a(n_members), resp_b(n_members);
  for (std::size_t l = 0; l < n_members; ++l) {
    resp_a[l] = tabulate(model.members()[l].side_a, grid);
    resp_b[l] = tabulate(model.members()[l].side_b, grid);
  }

  std::vector<double> rows(n);
  parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> inner(n);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (int m : {-1, 1})
          for (int mp : {-1, 1}) {
            double p_hv = 0.0;
            for (std::size_t l = 0; l < n_members; ++l) {
              p_hv += model.members()[l].weight * 0.25 * (1.0 + m * resp_a[l][i]) * (1.0 + mp * resp_b[l][j]);
            }
            s += p_qm(m, mp, nodes[i], nodes[j], v) * p_hv;
          }
        inner[j] = w[j] * s;
      }
      rows[i] = w[i] * pairwise_sum(inner);
    }
  }, 16);
  return pairwise_sum(rows);
}

double lhv_bound_analytic(Visibility v) { return 4.0 * kPi * kPi * (1.0 + v.value() / 4.0); }

std::string StrategyFamily::describe() const {
  if (kind == Kind::hemisphere_pair) return "hemisphere-pair";
  return "harmonic(L=" + std::to_string(degree) + ")";
}

namespace {

LhvModel model_from_parameters(const StrategyFamily& family, const std::vector<double>& x) {
  if (family.kind == StrategyFamily::Kind::hemisphere_pair) {
    return LhvModel::single(ResponseStrategy::hemisphere(direction_from_angles(x[0], x[1])),
                            ResponseStrategy::hemisphere(direction_from_angles(x[2], x[3])));
  }
  const std::size_t half = x.size() / 2;
  return LhvModel::single(
      ResponseStrategy::harmonic(family.degree, std::vector<double>(x.begin(), x.begin() + half)),
      ResponseStrategy::harmonic(family.degree, std::vector<double>(x.begin() + half, x.end())));
}

}  // namespace

OptimizeResult optimize_lhv(Visibility v, const StrategyFamily& family, const QuadratureGrid& grid,
                            int budget, std::uint64_t seed) {
  if (budget < 100) throw std::invalid_argument("optimize_lhv: budget must be >= 100");
  if (family.kind == StrategyFamily::Kind::harmonic && family.degree < 0) {
    throw std::invalid_argument("optimize_lhv: harmonic degree must be >= 0");
  }

  const std::size_t dim = family.kind == StrategyFamily::Kind::hemisphere_pair
                              ? 4
                              : 2 * harmonic_monomials(family.degree).size();
  auto objective = [&](const std::vector<double>& x) {
    return -lhv_functional_value(model_from_parameters(family, x), v, grid);
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  NelderMeadOptions opts;
  opts.max_evaluations = budget / kOptimizeRestarts;
  opts.initial_step = family.kind == StrategyFamily::Kind::hemisphere_pair ? 0.6 : 0.4;

  std::optional<NelderMeadResult> best;
  int evaluations = 0;
  for (int r = 0; r < kOptimizeRestarts; ++r) {
    std::vector<double> start(dim);
    if (family.kind == StrategyFamily::Kind::hemisphere_pair) {
      for (std::size_t k = 0; k < dim; k += 2) {
        start[k] = std::acos(2.0 * unit(rng) - 1.0);
        start[k + 1] = 2.0 * kPi * unit(rng);
      }
    } else {
      for (double& c : start) c = 2.0 * unit(rng) - 1.0;
    }
    auto res = nelder_mead(objective, start, opts);
    evaluations += res.evaluations;
    if (!best || res.value < best->value) best = std::move(res);
  }

  auto model = model_from_parameters(family, best->x);
  const double fine = lhv_functional_value(model, v, build_grid(grid.order().doubled(), grid.rule()));
  const double value = -best->value;
  return OptimizeResult{std::move(model), value, evaluations, best->simplex_size, best->converged,
                        kOptimizeRestarts, std::abs(value - fine)};
}

}  // namespace funcbell
