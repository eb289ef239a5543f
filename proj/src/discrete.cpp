#include "funcbell/discrete.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "funcbell/parallel.hpp"

namespace funcbell {

namespace {

constexpr double kPi = std::numbers::pi;

double expected_total(EnsembleGeometry g) { return g == EnsembleGeometry::full_sphere ? 4.0 * kPi : 2.0 * kPi; }

}  // namespace

SettingEnsemble::SettingEnsemble(std::vector<Direction> settings, std::vector<double> weights,
                                 EnsembleGeometry geometry, std::string weight_convention)
    : settings_(std::move(settings)),
      weights_(std::move(weights)),
      geometry_(geometry),
      convention_(std::move(weight_convention)) {
  if (settings_.empty()) throw std::invalid_argument("SettingEnsemble: no settings");
  if (settings_.size() != weights_.size()) {
    throw std::invalid_argument("SettingEnsemble: settings and weights differ in length");
  }
  for (double w : weights_)
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("SettingEnsemble: weights must be positive");
  const double expected = expected_total(geometry_);
  if (std::abs(total_weight() - expected) > 1e-10 * expected) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "SettingEnsemble: weights sum to " << total_weight() << ", expected " << expected;
    throw std::invalid_argument(msg.str());
  }
}

double SettingEnsemble::total_weight() const { return pairwise_sum(weights_); }

SettingEnsemble SettingEnsemble::from_grid(const QuadratureGrid& grid) {
  return SettingEnsemble(grid.nodes(), grid.weights(), EnsembleGeometry::full_sphere, "quadrature");
}

SettingEnsemble SettingEnsemble::from_circle(const CircleGrid& grid) {
  return SettingEnsemble(grid.nodes, grid.weights, EnsembleGeometry::coplanar, "quadrature");
}

SettingEnsemble SettingEnsemble::uniform(std::vector<Direction> settings, EnsembleGeometry geometry) {
  const std::size_t n = settings.size();
  if (n == 0) throw std::invalid_argument("SettingEnsemble: no settings");
  std::vector<double> w(n, expected_total(geometry) / double(n));
  return SettingEnsemble(std::move(settings), std::move(w), geometry, "uniform");
}

SettingEnsemble parse_ensemble(std::istream& in, EnsembleGeometry geometry) {
  std::vector<Direction> settings;
  std::vector<double> weights;
  std::optional<bool> weighted;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (tokens.size() != 2 && tokens.size() != 3) {
      throw EnsembleParseError(line_no, "expected 'theta phi [weight]', got " + std::to_string(tokens.size()) +
                                            " fields");
    }
    double vals[3] = {0, 0, 0};
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      std::size_t used = 0;
      try {
        vals[k] = std::stod(tokens[k], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tokens[k].size()) throw EnsembleParseError(line_no, "not a number: '" + tokens[k] + "'");
    }
    const bool has_weight = tokens.size() == 3;
    if (weighted && *weighted != has_weight) {
      throw EnsembleParseError(line_no, "either every setting carries a weight or none does");
    }
    weighted = has_weight;
    try {
      settings.emplace_back(vals[0], vals[1]);
    } catch (const std::invalid_argument& e) {
      throw EnsembleParseError(line_no, e.what());
    }
    if (has_weight) {
      if (!(vals[2] > 0.0)) throw EnsembleParseError(line_no, "weight must be positive");
      weights.push_back(vals[2]);
    }
  }
  if (settings.empty()) throw EnsembleParseError(line_no, "no settings found");
  if (!*weighted) return SettingEnsemble::uniform(std::move(settings), geometry);
  try {
    return SettingEnsemble(std::move(settings), std::move(weights), geometry, "file");
  } catch (const std::invalid_argument& e) {
    throw EnsembleParseError(line_no, e.what());
  }
}

SettingEnsemble load_ensemble(const std::filesystem::path& path, EnsembleGeometry geometry) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ensemble file " + path.string());
  try {
    return parse_ensemble(in, geometry);
  } catch (const EnsembleParseError& e) {
    throw EnsembleParseError(e.line(), e.detail(), path.string());
  }
}

double discrete_quantum_value(const SettingEnsemble& ens_a, const SettingEnsemble& ens_b, Visibility v) {
  const auto& a = ens_a.settings();
  const auto& b = ens_b.settings();
  std::vector<double> rows(a.size());
  parallel_blocks(a.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> inner(b.size());
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        double s = 0.0;
        for (int m : {-1, 1})
          for (int mp : {-1, 1}) {
            const double p = p_qm(m, mp, a[i], b[j], v);
            s += p * p;
          }
        inner[j] = ens_b.weights()[j] * s;
      }
      rows[i] = ens_a.weights()[i] * pairwise_sum(inner);
    }
  }, 16);
  return pairwise_sum(rows);
}

std::string to_string(LhvMethod m) { return m == LhvMethod::brute_force ? "brute-force" : "alternating"; }

Vec3 weighted_resultant(const DiscreteStrategy& s, const SettingEnsemble& ens) {
  std::vector<double> terms(ens.size());
  Vec3 out{};
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < ens.size(); ++i) terms[i] = ens.weights()[i] * s.signs[i] * ens.settings()[i][k];
    out[k] = pairwise_sum(terms);
  }
  return out;
}

double best_response(const Vec3& x, const SettingEnsemble& ens, DiscreteStrategy* out) {
  std::vector<double> terms(ens.size());
  if (out) out->signs.assign(ens.size(), 1);
  for (std::size_t j = 0; j < ens.size(); ++j) {
    const double c = dot(ens.settings()[j].cartesian(), x);
    if (out) out->signs[j] = c >= 0.0 ? 1 : -1;
    terms[j] = ens.weights()[j] * std::abs(c);
  }
  return pairwise_sum(terms);
}

namespace {

struct SignPair {
  double correlation;
  DiscreteStrategy s;
  DiscreteStrategy t;
};

// Exhaustive over the signs of `outer`, closed-form best response on `inner`.
SignPair brute_force(const SettingEnsemble& outer, const SettingEnsemble& inner) {
  const std::size_t n = outer.size();
  // s and -s give the same optimum (with t -> -t), so s_0 stays +1.
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  DiscreteStrategy s{std::vector<int>(n, 1)};
  Vec3 x = weighted_resultant(s, outer);
  double best = -1.0;
  std::uint64_t best_code = 0;
  for (std::uint64_t k = 0; k < count; ++k) {
    if (k > 0) {
      // Gray code: flip the lowest set bit of k.
      const int bit = std::countr_zero(k);
      const std::size_t i = static_cast<std::size_t>(bit) + 1;
      s.signs[i] = -s.signs[i];
      const double f = 2.0 * s.signs[i] * outer.weights()[i];
      for (int c = 0; c < 3; ++c) x[c] += f * outer.settings()[i][c];
    }
    const double value = best_response(x, inner);
    if (value > best) {
      best = value;
      best_code = k ^ (k >> 1);
    }
  }
  SignPair out;
  out.s.signs.assign(n, 1);
  for (std::size_t i = 1; i < n; ++i)
    if ((best_code >> (i - 1)) & 1U) out.s.signs[i] = -1;
  out.correlation = best_response(weighted_resultant(out.s, outer), inner, &out.t);
  return out;
}

SignPair alternate(DiscreteStrategy s, const SettingEnsemble& ens_a, const SettingEnsemble& ens_b) {
  DiscreteStrategy t;
  double current = best_response(weighted_resultant(s, ens_a), ens_b, &t);
  for (int iter = 0; iter < 10000; ++iter) {
    DiscreteStrategy s_next;
    best_response(weighted_resultant(t, ens_b), ens_a, &s_next);
    DiscreteStrategy t_next;
    const double next = best_response(weighted_resultant(s_next, ens_a), ens_b, &t_next);
    if (!(next > current * (1.0 + 1e-15))) break;
    current = next;
    s = std::move(s_next);
    t = std::move(t_next);
  }
  return {current, std::move(s), std::move(t)};
}

}  // namespace

DiscreteLhvResult discrete_lhv_max(const SettingEnsemble& ens_a, const SettingEnsemble& ens_b, Visibility v,
                                   LhvMethod method, int restarts, std::uint64_t seed) {
  DiscreteLhvResult result;
  result.method = method;
  if (method == LhvMethod::brute_force) {
    if (ens_a.size() + ens_b.size() > kBruteForceLimit) {
      throw std::invalid_argument("brute-force LHV maximization needs N_a + N_b <= " +
                                  std::to_string(kBruteForceLimit) + ", got " +
                                  std::to_string(ens_a.size() + ens_b.size()));
    }
    const bool swap = ens_a.size() > ens_b.size();
    SignPair best = swap ? brute_force(ens_b, ens_a) : brute_force(ens_a, ens_b);
    if (swap) std::swap(best.s, best.t);
    result.correlation = best.correlation;
    result.side_a = std::move(best.s);
    result.side_b = std::move(best.t);
    result.exact = true;
  } else {
    if (restarts < 0) throw std::invalid_argument("alternating LHV maximization: restarts must be >= 0");
    std::vector<SignPair> runs(static_cast<std::size_t>(restarts) + 1);
    parallel_blocks(runs.size(), [&](std::size_t begin, std::size_t end) {
      for (std::size_t r = begin; r < end; ++r) {
        DiscreteStrategy start{std::vector<int>(ens_a.size(), 1)};
        if (r > 0) {
          std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                            static_cast<std::uint32_t>(r)};
          std::mt19937_64 rng(seq);
          for (int& sign : start.signs) sign = (rng() >> 63) ? -1 : 1;
        }
        runs[r] = alternate(std::move(start), ens_a, ens_b);
      }
    }, 1);
    std::size_t winner = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
      if (runs[r].correlation > runs[winner].correlation) winner = r;
    result.correlation = runs[winner].correlation;
    result.side_a = std::move(runs[winner].s);
    result.side_b = std::move(runs[winner].t);
    result.exact = false;
  }
  // Under the singlet the correlation term is -(v / 4) X . Y; flipping t turns
  // the X . Y maximizer into the maximizer of the functional.
  for (int& sign : result.side_b.signs) sign = -sign;
  result.value = ens_a.total_weight() * ens_b.total_weight() / 4.0 + v.value() / 4.0 * result.correlation;
  return result;
}

DiscreteThreshold discrete_threshold(const SettingEnsemble& ens_a, const SettingEnsemble& ens_b,
                                     std::optional<LhvMethod> method, int restarts, std::uint64_t seed) {
  const LhvMethod m = method.value_or(ens_a.size() + ens_b.size() <= kBruteForceLimit ? LhvMethod::brute_force
                                                                                      : LhvMethod::alternating);
  DiscreteThreshold out;
  out.method = m;
  out.exact = m == LhvMethod::brute_force;
  out.constant = discrete_quantum_value(ens_a, ens_b, Visibility(0.0));
  out.quadratic = discrete_quantum_value(ens_a, ens_b, Visibility(1.0)) - out.constant;

  for (int k = 0; k < kThresholdGridPoints; ++k) {
    const double v = double(k) / (kThresholdGridPoints - 1);
    if (v == 0.0) continue;  // every line passes through c0 at v = 0
    const auto lhv = discrete_lhv_max(ens_a, ens_b, Visibility(v), m, restarts, seed);
    out.linear = std::max(out.linear, lhv.correlation / 4.0);
  }

  if (out.quadratic > 0.0) {
    const double t = out.linear / out.quadratic;
    if (t < 1.0 - 1e-12) out.threshold = t;
  }
  return out;
}

}  // namespace funcbell
