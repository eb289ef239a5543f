#include "funcbell/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "funcbell/parallel.hpp"
#include "json.hpp"

namespace funcbell {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Uniform on [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::mt19937_64 block_generator(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

Direction uniform_direction(std::mt19937_64& rng) {
  const double u = 2.0 * unit(rng) - 1.0;
  const double phi = 2.0 * kPi * unit(rng);
  return Direction(std::acos(u), phi);
}

std::size_t pick(const std::vector<double>& cumulative, double u) {
  const double target = u * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<double> cumulative_of(const std::vector<double>& w) {
  std::vector<double> c(w.size());
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) c[i] = (s += w[i]);
  return c;
}

double at_9_digits(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace

std::string describe(const EventSource& source) {
  return std::visit(overloaded{[](const QuantumSource& q) {
                                 std::ostringstream s;
                                 s.precision(17);
                                 s << "quantum(v=" << q.v.value() << ")";
                                 return s.str();
                               },
                               [](const LhvSource& l) {
                                 std::ostringstream s;
                                 s.precision(17);
                                 s << "lhv(";
                                 for (std::size_t i = 0; i < l.model.members().size(); ++i) {
                                   const auto& m = l.model.members()[i];
                                   s << (i ? ";" : "") << m.weight << ":" << m.side_a.describe() << "|"
                                     << m.side_b.describe();
                                 }
                                 s << ")";
                                 return s.str();
                               }},
                    source);
}

std::string describe(const SettingSampler& sampler) {
  return std::visit(overloaded{[](const UniformSphereSampler&) { return std::string("uniform-sphere"); },
                               [](const EnsembleSampler& e) {
                                 return "ensemble(" + std::to_string(e.side_a.size()) + "x" +
                                        std::to_string(e.side_b.size()) + ")";
                               }},
                    sampler);
}

EventStream generate_events(const EventSource& source, const SettingSampler& sampler, std::uint64_t n,
                            std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_events: n must be >= 1");
  EventStream stream;
  stream.metadata = {seed, describe(source), describe(sampler), n,
                     std::holds_alternative<UniformSphereSampler>(sampler)};
  stream.events.resize(n);

  const auto* ensembles = std::get_if<EnsembleSampler>(&sampler);
  std::vector<double> cum_a, cum_b;
  if (ensembles) {
    cum_a = cumulative_of(ensembles->side_a.weights());
    cum_b = cumulative_of(ensembles->side_b.weights());
  }
  const auto* lhv = std::get_if<LhvSource>(&source);
  std::vector<double> cum_members;
  if (lhv) {
    std::vector<double> w;
    for (const auto& m : lhv->model.members()) w.push_back(m.weight);
    cum_members = cumulative_of(w);
  }

  parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
    auto rng = block_generator(seed, begin / kBlockSize);
    for (std::size_t i = begin; i < end; ++i) {
      EventRecord& ev = stream.events[i];
      if (ensembles) {
        ev.a = ensembles->side_a.settings()[pick(cum_a, unit(rng))];
        ev.b = ensembles->side_b.settings()[pick(cum_b, unit(rng))];
      } else {
        ev.a = uniform_direction(rng);
        ev.b = uniform_direction(rng);
      }
      if (lhv) {
        const auto& member = lhv->model.members()[pick(cum_members, unit(rng))];
        ev.m_a = unit(rng) < 0.5 * (1.0 + member.side_a.evaluate(ev.a)) ? 1 : -1;
        ev.m_b = unit(rng) < 0.5 * (1.0 + member.side_b.evaluate(ev.b)) ? 1 : -1;
      } else {
        const double v = std::get<QuantumSource>(source).v.value();
        // Marginals are fair; the partner is anti-correlated with probability (1 + v a.b) / 2.
        ev.m_a = unit(rng) < 0.5 ? 1 : -1;
        ev.m_b = unit(rng) < 0.5 * (1.0 + v * dot(ev.a, ev.b)) ? -ev.m_a : ev.m_a;
      }
    }
  });
  return stream;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::violation:
      return "violation";
    case Verdict::no_violation:
      return "no-violation";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

EstimateReport estimate_functional(const EventStream& stream, Visibility v_assumed, double sigma_threshold) {
  if (!stream.metadata.area_uniform) {
    throw std::invalid_argument(
        "estimate_functional: settings were not drawn area-uniformly; the (4 pi)^2 reweighting would be biased");
  }
  const std::size_t n = stream.events.size();
  if (n < kMinEstimateEvents) {
    throw std::invalid_argument("estimate_functional: need at least " + std::to_string(kMinEstimateEvents) +
                                " events, got " + std::to_string(n));
  }
  if (!(sigma_threshold > 0.0)) throw std::invalid_argument("estimate_functional: sigma threshold must be > 0");

  const double scale = 16.0 * kPi * kPi;
  std::vector<double> x(n);
  parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& ev = stream.events[i];
      x[i] = scale * p_qm(ev.m_a, ev.m_b, ev.a, ev.b, v_assumed);
    }
  });
  const double mean = pairwise_sum(x) / double(n);
  parallel_blocks(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) x[i] = (x[i] - mean) * (x[i] - mean);
  });
  const double variance = pairwise_sum(x) / double(n - 1);

  EstimateReport r;
  r.n_events = n;
  r.functional_estimate = mean;
  r.std_error = std::sqrt(variance / double(n));
  r.lhv_bound = lhv_bound_analytic(v_assumed);
  r.quantum_expectation = norm_sq_qm_analytic(v_assumed);
  r.sigma_threshold = sigma_threshold;
  const double excess = r.functional_estimate - r.lhv_bound;
  r.significance = r.std_error > 0.0 ? excess / r.std_error : (excess > 0 ? HUGE_VAL : (excess < 0 ? -HUGE_VAL : 0.0));
  if (excess > sigma_threshold * r.std_error) {
    r.verdict = Verdict::violation;
  } else if (r.quantum_expectation - r.functional_estimate > sigma_threshold * r.std_error) {
    r.verdict = Verdict::no_violation;
  } else {
    r.verdict = Verdict::inconclusive;
  }
  return r;
}

EventStream at_csv_precision(const EventStream& stream) {
  EventStream out = stream;
  for (auto& ev : out.events) {
    ev.a = Direction(at_9_digits(ev.a.theta()), at_9_digits(ev.a.phi()));
    ev.b = Direction(at_9_digits(ev.b.theta()), at_9_digits(ev.b.phi()));
  }
  return out;
}

void write_events_csv(const EventStream& stream, std::ostream& out) {
  out << "theta_a,phi_a,theta_b,phi_b,m_a,m_b\n";
  char buf[160];
  for (const auto& ev : stream.events) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%d,%d\n", ev.a.theta(), ev.a.phi(), ev.b.theta(),
                  ev.b.phi(), ev.m_a, ev.m_b);
    out << buf;
  }
}

EventStream read_events_csv(std::istream& in) {
  EventStream stream;
  std::string line;
  if (!std::getline(in, line)) throw EventFileError("line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "theta_a,phi_a,theta_b,phi_b,m_a,m_b") {
    throw EventFileError("line 1: expected header 'theta_a,phi_a,theta_b,phi_b,m_a,m_b'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != 6) {
      throw EventFileError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                           std::to_string(fields.size()));
    }
    double vals[4];
    int outcomes[2];
    try {
      for (int k = 0; k < 4; ++k) {
        std::size_t used = 0;
        vals[k] = std::stod(fields[k], &used);
        if (used != fields[k].size()) throw std::invalid_argument(fields[k]);
      }
      for (int k = 0; k < 2; ++k) {
        std::size_t used = 0;
        outcomes[k] = std::stoi(fields[4 + k], &used);
        if (used != fields[4 + k].size()) throw std::invalid_argument(fields[4 + k]);
        check_outcome(outcomes[k]);
      }
      stream.events.push_back({Direction(vals[0], vals[1]), Direction(vals[2], vals[3]), outcomes[0], outcomes[1]});
    } catch (const std::exception& e) {
      throw EventFileError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  stream.metadata.n = stream.events.size();
  return stream;
}

void write_metadata(const StreamMetadata& meta, std::ostream& out) {
  nlohmann::ordered_json j;
  j["seed"] = meta.seed;
  j["source"] = meta.source;
  j["sampler"] = meta.sampler;
  j["n"] = meta.n;
  j["area_uniform"] = meta.area_uniform;
  out << j.dump(2) << "\n";
}

StreamMetadata read_metadata(std::istream& in) {
  try {
    const auto j = nlohmann::json::parse(in);
    StreamMetadata m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.source = j.at("source").get<std::string>();
    m.sampler = j.at("sampler").get<std::string>();
    m.n = j.at("n").get<std::uint64_t>();
    m.area_uniform = j.at("area_uniform").get<bool>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw EventFileError(std::string("metadata: ") + e.what());
  }
}

std::filesystem::path metadata_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p += ".meta.json";
  return p;
}

}  // namespace funcbell
