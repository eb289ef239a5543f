#pragma once

// The functional restricted to finitely many settings per side. Integrals
// become weighted sums over the settings and the LHV maximum is taken over
// sign vectors, the extreme points of the local response polytope.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "funcbell/quantum.hpp"
#include "funcbell/sphere.hpp"

namespace funcbell {

enum class EnsembleGeometry { full_sphere, coplanar };

/// Settings with positive weights. Weights sum to 4 pi (sphere) or 2 pi
/// (circle) within 1e-10.
class SettingEnsemble {
 public:
  SettingEnsemble(std::vector<Direction> settings, std::vector<double> weights,
                  EnsembleGeometry geometry, std::string weight_convention);

  static SettingEnsemble from_grid(const QuadratureGrid& grid);
  static SettingEnsemble from_circle(const CircleGrid& grid);
  /// Uniform weights 4 pi / N (sphere) or 2 pi / N (circle).
  static SettingEnsemble uniform(std::vector<Direction> settings, EnsembleGeometry geometry);

  const std::vector<Direction>& settings() const { return settings_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return settings_.size(); }
  EnsembleGeometry geometry() const { return geometry_; }
  /// "quadrature", "uniform" or "file".
  const std::string& weight_convention() const { return convention_; }
  double total_weight() const;

 private:
  std::vector<Direction> settings_;
  std::vector<double> weights_;
  EnsembleGeometry geometry_;
  std::string convention_;
};

/// Raised for malformed ensemble files; the message names the line.
class EnsembleParseError : public std::runtime_error {
 public:
  EnsembleParseError(std::size_t line, const std::string& detail, const std::string& source = "")
      : std::runtime_error((source.empty() ? "" : source + ": ") + "line " + std::to_string(line) + ": " + detail),
        line_(line),
        detail_(detail) {}
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// Plain text, one "theta phi [weight]" per line, '#' starts a comment.
/// Either every setting line carries a weight or none does (uniform weights).
SettingEnsemble parse_ensemble(std::istream& in, EnsembleGeometry geometry);
SettingEnsemble load_ensemble(const std::filesystem::path& path, EnsembleGeometry geometry);

struct DiscreteStrategy {
  std::vector<int> signs;
};

/// sum_ij w_i w_j sum_{m,m'} P_QM(m, m'; a_i, b_j)^2.
double discrete_quantum_value(const SettingEnsemble& ens_a, const SettingEnsemble& ens_b, Visibility v);

enum class LhvMethod { brute_force, alternating };
std::string to_string(LhvMethod m);

inline constexpr std::size_t kBruteForceLimit = 26;
inline constexpr int kDefaultRestarts = 32;

struct DiscreteLhvResult {
  double value = 0.0;
  /// max over sign vectors of X . Y, X = sum_i w_i s_i a_i, Y = sum_j w_j t_j b_j.
  double correlation = 0.0;
  DiscreteStrategy side_a;
  /// Maximizes the functional, so side_b = -(maximizer of X . Y).
  DiscreteStrategy side_b;
  LhvMethod method = LhvMethod::brute_force;
  /// brute force is exact; alternating is a lower bound on the maximum.
  bool exact = true;
};

/// Maximum of (W_a W_b) / 4 - (v / 4) X . Y over sign vectors s, t, which
/// equals (W_a W_b) / 4 + (v / 4) max X . Y.
/// brute_force enumerates s (the smaller side) and takes the optimal t in
/// closed form, t_j = sign(b_j . X); it needs N_a + N_b <= kBruteForceLimit.
/// alternating starts from all +1 and then `restarts` seeded random sign
/// vectors, alternating closed-form updates until no improvement.
DiscreteLhvResult discrete_lhv_max(const SettingEnsemble& ens_a, const SettingEnsemble& ens_b, Visibility v,
                                   LhvMethod method, int restarts = kDefaultRestarts, std::uint64_t seed = 0);

/// Best response t_j = sign(b_j . x) (sign(0) = +1) and the value sum_j w_j |b_j . x|.
double best_response(const Vec3& x, const SettingEnsemble& ens, DiscreteStrategy* out = nullptr);

/// sum_i w_i s_i n_i.
Vec3 weighted_resultant(const DiscreteStrategy& s, const SettingEnsemble& ens);

struct DiscreteThreshold {
  /// +infinity when no v <= 1 violates.
  double threshold = std::numeric_limits<double>::infinity();
  /// quantum value = c0 + quadratic * v^2
  double quadratic = 0.0;
  /// LHV maximum = c0 + linear * v (upper envelope over the v grid)
  double linear = 0.0;
  double constant = 0.0;
  LhvMethod method = LhvMethod::brute_force;
  bool exact = true;
  bool violates() const { return threshold <= 1.0; }
};

inline constexpr int kThresholdGridPoints = 21;

/// Solves c0 + quadratic v^2 = c0 + linear v. The LHV slope is the upper
/// envelope of the maximizing lines found on kThresholdGridPoints visibilities
/// in [0, 1]. Method defaults to brute force when the instance fits.
DiscreteThreshold discrete_threshold(const SettingEnsemble& ens_a, const SettingEnsemble& ens_b,
                                     std::optional<LhvMethod> method = std::nullopt,
                                     int restarts = kDefaultRestarts, std::uint64_t seed = 0);

}  // namespace funcbell
