#pragma once

// Event-by-event Monte Carlo of a two-observer experiment and the plug-in
// estimator of <P_QM | P_source> from the recorded events.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "funcbell/discrete.hpp"
#include "funcbell/lhv.hpp"
#include "funcbell/quantum.hpp"
#include "funcbell/sphere.hpp"

namespace funcbell {

struct EventRecord {
  Direction a;
  Direction b;
  int m_a = 1;
  int m_b = 1;
};

struct QuantumSource {
  Visibility v{1.0};
};
struct LhvSource {
  LhvModel model;
};
using EventSource = std::variant<QuantumSource, LhvSource>;

struct UniformSphereSampler {};
/// Settings drawn from the ensembles with probability proportional to weight.
struct EnsembleSampler {
  SettingEnsemble side_a;
  SettingEnsemble side_b;
};
using SettingSampler = std::variant<UniformSphereSampler, EnsembleSampler>;

struct StreamMetadata {
  std::uint64_t seed = 0;
  std::string source;
  std::string sampler;
  std::uint64_t n = 0;
  /// Settings were drawn area-uniformly on both spheres.
  bool area_uniform = false;
};

struct EventStream {
  StreamMetadata metadata;
  std::vector<EventRecord> events;
};

std::string describe(const EventSource& source);
std::string describe(const SettingSampler& sampler);

/// i.i.d. events. Event i draws from a generator seeded by (seed, i / kBlockSize),
/// so the stream is identical for any worker count.
EventStream generate_events(const EventSource& source, const SettingSampler& sampler, std::uint64_t n,
                            std::uint64_t seed);

enum class Verdict { violation, no_violation, inconclusive };
std::string to_string(Verdict v);

struct EstimateReport {
  std::uint64_t n_events = 0;
  double functional_estimate = 0.0;
  double std_error = 0.0;
  double lhv_bound = 0.0;
  /// ||P_QM||^2 at the assumed visibility, the value a quantum source would give.
  double quantum_expectation = 0.0;
  /// (estimate - lhv_bound) / std_error
  double significance = 0.0;
  double sigma_threshold = 3.0;
  Verdict verdict = Verdict::inconclusive;
};

inline constexpr std::uint64_t kMinEstimateEvents = 100;

/// Mean of (4 pi)^2 P_QM(m_a, m_b; a, b; v_assumed) over the events.
/// violation: estimate - bound > k sigma.
/// no_violation: otherwise, when the estimate also lies more than k sigma
///   below the quantum expectation.
/// inconclusive: neither.
/// Throws std::invalid_argument for fewer than kMinEstimateEvents events or a
/// stream whose settings were not drawn area-uniformly.
EstimateReport estimate_functional(const EventStream& stream, Visibility v_assumed, double sigma_threshold = 3.0);

/// Rounds every setting angle to the 9 significant digits of the CSV format.
EventStream at_csv_precision(const EventStream& stream);

/// Header "theta_a,phi_a,theta_b,phi_b,m_a,m_b"; angles with 9 significant digits.
void write_events_csv(const EventStream& stream, std::ostream& out);
/// Reads events; metadata is left default (not area-uniform).
EventStream read_events_csv(std::istream& in);

/// JSON sidecar with seed, source, sampler, n and area_uniform.
void write_metadata(const StreamMetadata& meta, std::ostream& out);
StreamMetadata read_metadata(std::istream& in);
std::filesystem::path metadata_path(const std::filesystem::path& csv_path);

/// Raised for malformed event files; the message names the line.
class EventFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace funcbell
