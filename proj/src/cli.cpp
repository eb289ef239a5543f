#include "funcbell/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "funcbell/discrete.hpp"
#include "funcbell/functional.hpp"
#include "funcbell/lhv.hpp"
#include "funcbell/parallel.hpp"
#include "funcbell/simulate.hpp"
#include "json.hpp"

namespace funcbell::cli {

namespace {

// Input file problems map to exit code 3.
struct InputFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Value = std::variant<std::monostate, double, std::int64_t, std::string, bool>;
using Record = std::vector<std::pair<std::string, Value>>;

enum class Format { human, csv, jsonl };

std::string fmt_double(double x, int digits) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string to_text(const Value& v, int digits) {
  struct {
    int digits;
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double x) const { return fmt_double(x, digits); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  } visitor{digits};
  return std::visit(visitor, v);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void emit(const std::vector<Record>& rows, Format format, std::ostream& out) {
  switch (format) {
    case Format::csv: {
      if (rows.empty()) return;
      for (std::size_t k = 0; k < rows.front().size(); ++k) out << (k ? "," : "") << rows.front()[k].first;
      out << "\n";
      for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << csv_escape(to_text(row[k].second, 17));
        out << "\n";
      }
      return;
    }
    case Format::jsonl: {
      for (const auto& row : rows) {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (const auto& [key, value] : row) {
          std::visit(
              [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, std::monostate>) {
                  j[key] = nullptr;
                } else if constexpr (std::is_same_v<T, double>) {
                  if (std::isfinite(x)) {
                    j[key] = x;
                  } else {
                    j[key] = fmt_double(x, 17);
                  }
                } else {
                  j[key] = x;
                }
              },
              value);
        }
        out << j.dump() << "\n";
      }
      return;
    }
    case Format::human: {
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r) out << "\n";
        std::size_t width = 0;
        for (const auto& [key, value] : rows[r]) width = std::max(width, key.size());
        for (const auto& [key, value] : rows[r]) {
          out << key << std::string(width - key.size() + 2, ' ') << to_text(value, 10) << "\n";
        }
      }
      return;
    }
  }
}

Value optional_value(const std::optional<double>& x) {
  if (x) return *x;
  return std::monostate{};
}

Record report_record(const InequalityReport& r) {
  return {{"geometry", to_string(r.geometry)},
          {"v", r.v},
          {"quantum_value", r.quantum_value},
          {"lhv_bound", r.lhv_bound},
          {"lhv_best_found", optional_value(r.lhv_best_found)},
          {"margin", r.margin},
          {"margin_ratio", r.margin_ratio},
          {"threshold_v", r.threshold_v},
          {"n_theta", std::int64_t{r.grid_order.n_theta}},
          {"n_phi", std::int64_t{r.grid_order.n_phi}},
          {"quad_error_estimate", r.quad_error_estimate},
          {"violated", r.violated}};
}

Record estimate_record(const EstimateReport& r, const StreamMetadata& meta) {
  return {{"n_events", static_cast<std::int64_t>(r.n_events)},
          {"functional_estimate", r.functional_estimate},
          {"std_error", r.std_error},
          {"lhv_bound", r.lhv_bound},
          {"quantum_expectation", r.quantum_expectation},
          {"significance", r.significance},
          {"sigma_threshold", r.sigma_threshold},
          {"verdict", to_string(r.verdict)},
          {"seed", static_cast<std::int64_t>(meta.seed)},
          {"source", meta.source},
          {"sampler", meta.sampler}};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

GridOrder parse_order(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw std::invalid_argument("grid order '" + s + "' is not of the form NTHETAxNPHI");
  try {
    return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
  } catch (const std::exception&) {
    throw std::invalid_argument("grid order '" + s + "' is not of the form NTHETAxNPHI");
  }
}

InequalityReport evaluate_with_options(Geometry g, double v, GridOrder order, bool optimize, int budget,
                                       std::uint64_t seed) {
  auto report = evaluate_inequality(g, Visibility(v), order);
  if (!optimize) return report;
  if (g == Geometry::full_sphere) {
    report.lhv_best_found =
        optimize_lhv(Visibility(v), StrategyFamily::hemisphere_pair(), build_grid(order), budget, seed).value;
  } else {
    // Anti-aligned half-circle strategies; the value does not depend on the common axis.
    const int even = order.n_phi + order.n_phi % 2;
    report.lhv_best_found = coplanar_lhv_value_numeric(
        Visibility(v), 0.0, std::numbers::pi, build_circle_grid(even, CircleRule::split_gauss_legendre));
  }
  return report;
}

struct Options {
  std::string format = "human";
  unsigned threads = 0;

  // evaluate / sweep
  std::string geometry = "sphere";
  double v = 1.0;
  int n_theta = 16;
  int n_phi = 32;
  bool optimize = false;
  double v_min = 0.0;
  double v_max = 1.0;
  int steps = 11;

  // threshold
  std::string threshold_geometry = "all";

  // optimize-lhv
  std::string family = "hemisphere-pair";
  int degree = 1;
  int budget = 2000;
  std::uint64_t seed = 1;

  // discretize
  std::string ensemble_a;
  std::string ensemble_b;
  bool coplanar_files = false;
  std::string quadrature_orders;
  std::string coplanar_sizes;
  int random_size = 0;
  int instances = 1;
  std::string mode = "threshold";
  std::string method = "auto";
  int restarts = kDefaultRestarts;

  // simulate
  std::string source = "quantum";
  double source_v = 1.0;
  std::string lhv_model = "optimized";
  double v_assumed = 1.0;
  std::uint64_t n_events = 1000000;
  double sigma = 3.0;
  std::string dump;
  std::string from_file;
  bool assume_uniform = false;
};

std::vector<Record> cmd_evaluate(const Options& o) {
  const Geometry g = parse_geometry(o.geometry);
  return {report_record(evaluate_with_options(g, o.v, {o.n_theta, o.n_phi}, o.optimize, o.budget, o.seed))};
}

std::vector<Record> cmd_threshold(const Options& o) {
  std::vector<Record> rows;
  auto add = [&](const std::string& name, double value, const std::string& kind) {
    rows.push_back({{"name", name}, {"threshold_v", value}, {"kind", kind}});
  };
  const bool all = o.threshold_geometry == "all";
  if (!all) parse_geometry(o.threshold_geometry);
  if (all || parse_geometry(o.threshold_geometry) == Geometry::full_sphere)
    add("full-sphere", threshold_visibility(Geometry::full_sphere), "functional");
  if (all || parse_geometry(o.threshold_geometry) == Geometry::coplanar)
    add("coplanar", threshold_visibility(Geometry::coplanar), "functional");
  if (all) {
    add("gisin", thresholds::kGisin, "reference");
    add("chained-limit", thresholds::kChainedLimit, "reference");
  }
  return rows;
}

std::vector<Record> cmd_optimize(const Options& o) {
  StrategyFamily family;
  if (o.family == "hemisphere-pair") {
    family = StrategyFamily::hemisphere_pair();
  } else if (o.family == "harmonic") {
    family = StrategyFamily::harmonic(o.degree);
  } else {
    throw std::invalid_argument("unknown strategy family '" + o.family + "'");
  }
  const Visibility v(o.v);
  const auto res = optimize_lhv(v, family, build_grid(o.n_theta, o.n_phi), o.budget, o.seed);
  const auto& m = res.model.members().front();
  return {{{"family", family.describe()},
           {"v", o.v},
           {"value", res.value},
           {"lhv_bound", lhv_bound_analytic(v)},
           {"gap", lhv_bound_analytic(v) - res.value},
           {"grid_error", res.grid_error},
           {"evaluations", std::int64_t{res.evaluations}},
           {"restarts", std::int64_t{res.restarts}},
           {"final_simplex_size", res.final_simplex_size},
           {"converged", res.converged},
           {"strategy_a", m.side_a.describe()},
           {"strategy_b", m.side_b.describe()}}};
}

struct NamedPair {
  std::string label;
  SettingEnsemble a;
  SettingEnsemble b;
};

std::vector<NamedPair> discretize_inputs(const Options& o) {
  std::vector<NamedPair> pairs;
  if (!o.ensemble_a.empty() || !o.ensemble_b.empty()) {
    if (o.ensemble_a.empty() || o.ensemble_b.empty()) {
      throw std::invalid_argument("--ensemble-a and --ensemble-b must be given together");
    }
    const auto g = o.coplanar_files ? EnsembleGeometry::coplanar : EnsembleGeometry::full_sphere;
    try {
      pairs.push_back({"files", load_ensemble(o.ensemble_a, g), load_ensemble(o.ensemble_b, g)});
    } catch (const std::runtime_error& e) {
      throw InputFileError(e.what());
    }
  }
  for (const auto& spec : split(o.quadrature_orders, ',')) {
    const auto order = parse_order(spec);
    const auto ens = SettingEnsemble::from_grid(build_grid(order));
    pairs.push_back({"quadrature(" + spec + ")", ens, ens});
  }
  for (const auto& spec : split(o.coplanar_sizes, ',')) {
    int n = 0;
    try {
      n = std::stoi(spec);
    } catch (const std::exception&) {
      throw std::invalid_argument("coplanar size '" + spec + "' is not an integer");
    }
    const auto ens = SettingEnsemble::from_circle(build_circle_grid(n));
    pairs.push_back({"coplanar(" + spec + ")", ens, ens});
  }
  if (o.random_size > 0) {
    std::mt19937_64 rng(o.seed);
    for (int k = 0; k < o.instances; ++k) {
      std::vector<Direction> a, b;
      for (int i = 0; i < o.random_size; ++i) a.push_back(random_direction(rng));
      for (int i = 0; i < o.random_size; ++i) b.push_back(random_direction(rng));
      pairs.push_back({"random(" + std::to_string(o.random_size) + "," + std::to_string(k) + ")",
                       SettingEnsemble::uniform(a, EnsembleGeometry::full_sphere),
                       SettingEnsemble::uniform(b, EnsembleGeometry::full_sphere)});
    }
  }
  if (pairs.empty()) {
    throw std::invalid_argument(
        "discretize needs --ensemble-a/--ensemble-b, --quadrature-orders, --coplanar-sizes or --random");
  }
  return pairs;
}

std::vector<Record> cmd_discretize(const Options& o) {
  if (o.mode != "value" && o.mode != "threshold") throw std::invalid_argument("--mode must be value or threshold");
  if (o.method != "auto" && o.method != "brute-force" && o.method != "alternating" && o.method != "both") {
    throw std::invalid_argument("--method must be auto, brute-force, alternating or both");
  }
  std::vector<Record> rows;
  for (const auto& p : discretize_inputs(o)) {
    const bool fits = p.a.size() + p.b.size() <= kBruteForceLimit;
    std::vector<LhvMethod> methods;
    if (o.method == "both") {
      methods = {LhvMethod::brute_force, LhvMethod::alternating};
    } else if (o.method == "brute-force") {
      methods = {LhvMethod::brute_force};
    } else if (o.method == "alternating") {
      methods = {LhvMethod::alternating};
    } else {
      methods = {fits ? LhvMethod::brute_force : LhvMethod::alternating};
    }

    // With --method both, oversized instances skip brute force instead of failing.
    std::vector<std::optional<double>> results;
    std::vector<bool> exact;
    for (const auto m : methods) {
      if (o.method == "both" && m == LhvMethod::brute_force && !fits) {
        results.push_back(std::nullopt);
        exact.push_back(false);
      } else if (o.mode == "threshold") {
        const auto t = discrete_threshold(p.a, p.b, m, o.restarts, o.seed);
        results.push_back(t.threshold);
        exact.push_back(t.exact);
      } else {
        const auto r = discrete_lhv_max(p.a, p.b, Visibility(o.v), m, o.restarts, o.seed);
        results.push_back(r.value);
        exact.push_back(r.exact);
      }
    }

    Record row{{"label", p.label},
               {"n_a", static_cast<std::int64_t>(p.a.size())},
               {"n_b", static_cast<std::int64_t>(p.b.size())},
               {"weights", p.a.weight_convention()},
               {"mode", o.mode}};
    if (o.mode == "value") {
      row.emplace_back("v", o.v);
      row.emplace_back("quantum_value", discrete_quantum_value(p.a, p.b, Visibility(o.v)));
    }
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const std::string prefix = methods.size() > 1 ? to_string(methods[k]) + "_" : "";
      if (methods.size() == 1) {
        row.emplace_back("method", to_string(methods[k]));
        row.emplace_back("exact", static_cast<bool>(exact[k]));
      }
      const auto& r = results[k];
      if (o.mode == "threshold") {
        const bool none = !r || std::isinf(*r);
        row.emplace_back(prefix + "threshold", none ? Value{} : Value{*r});
        row.emplace_back(prefix + "status", !r                ? "unavailable"
                                            : std::isinf(*r) ? "no-violation"
                                                             : "violation-above-threshold");
      } else {
        row.emplace_back(prefix + "lhv_max", r ? Value{*r} : Value{});
      }
    }
    if (methods.size() == 2) {
      std::string agreement = "brute-force-unavailable";
      if (results[0] && results[1]) {
        const double x = *results[0], y = *results[1];
        const bool agree =
            (std::isinf(x) && std::isinf(y)) || std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(x));
        agreement = agree ? "exact-confirmed" : "heuristic-below-exact";
      }
      row.emplace_back("agreement", agreement);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

LhvModel simulation_lhv_model(const Options& o) {
  if (o.lhv_model == "optimized") {
    return optimize_lhv(Visibility(o.v_assumed), StrategyFamily::hemisphere_pair(), build_grid(8, 16), 600, o.seed)
        .model;
  }
  if (o.lhv_model == "antialigned-hemisphere") {
    return LhvModel::single(ResponseStrategy::hemisphere(Direction(0, 0)),
                            ResponseStrategy::hemisphere(Direction(std::numbers::pi, 0)));
  }
  throw std::invalid_argument("unknown --lhv-model '" + o.lhv_model + "' (optimized or antialigned-hemisphere)");
}

std::vector<Record> cmd_simulate(const Options& o) {
  const Visibility v_assumed(o.v_assumed);
  EventStream stream;
  if (!o.from_file.empty()) {
    std::ifstream in(o.from_file);
    if (!in) throw InputFileError("cannot open event file " + o.from_file);
    try {
      stream = read_events_csv(in);
    } catch (const EventFileError& e) {
      throw InputFileError(o.from_file + ": " + e.what());
    }
    std::ifstream meta_in(metadata_path(o.from_file));
    if (meta_in) {
      try {
        const auto n = stream.events.size();
        stream.metadata = read_metadata(meta_in);
        if (stream.metadata.n != n) {
          throw InputFileError("metadata records n=" + std::to_string(stream.metadata.n) + " but the file has " +
                               std::to_string(n) + " events");
        }
      } catch (const EventFileError& e) {
        throw InputFileError(metadata_path(o.from_file).string() + ": " + e.what());
      }
    } else if (o.assume_uniform) {
      stream.metadata.area_uniform = true;
    } else {
      throw InputFileError("no metadata sidecar " + metadata_path(o.from_file).string() +
                           "; pass --assume-uniform if the settings were drawn area-uniformly");
    }
  } else {
    EventSource source = QuantumSource{Visibility(o.source_v)};
    if (o.source == "lhv") {
      source = LhvSource{simulation_lhv_model(o)};
    } else if (o.source != "quantum") {
      throw std::invalid_argument("unknown --source '" + o.source + "' (quantum or lhv)");
    }
    stream = at_csv_precision(generate_events(source, UniformSphereSampler{}, o.n_events, o.seed));
    if (!o.dump.empty()) {
      std::ofstream out(o.dump);
      std::ofstream meta_out(metadata_path(o.dump));
      if (!out || !meta_out) throw InputFileError("cannot write event file " + o.dump);
      write_events_csv(stream, out);
      write_metadata(stream.metadata, meta_out);
    }
  }
  return {estimate_record(estimate_functional(stream, v_assumed, o.sigma), stream.metadata)};
}

std::vector<Record> cmd_sweep(const Options& o) {
  if (!(o.v_min < o.v_max) || o.v_min < 0.0 || o.v_max > 1.0) {
    throw std::invalid_argument("sweep needs 0 <= v-min < v-max <= 1");
  }
  if (o.steps < 2) throw std::invalid_argument("sweep needs --steps >= 2");
  const Geometry g = parse_geometry(o.geometry);
  std::vector<Record> rows;
  for (int k = 0; k < o.steps; ++k) {
    const double v = k == o.steps - 1 ? o.v_max : o.v_min + (o.v_max - o.v_min) * k / (o.steps - 1);
    const auto r = evaluate_inequality(g, Visibility(v), {o.n_theta, o.n_phi});
    rows.push_back({{"v", r.v},
                    {"quantum", r.quantum_value},
                    {"bound", r.lhv_bound},
                    {"margin", r.margin},
                    {"margin_ratio", r.margin_ratio},
                    {"violated", r.violated}});
  }
  return rows;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Functional Bell inequality for the two-qubit singlet over continuous settings", "funcbell"};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.allow_config_extras(false);
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"human", "csv", "jsonl"}));
  app.add_option("--threads", o.threads, "Worker thread cap (0 = hardware concurrency)");

  auto grid_opts = [&](CLI::App* sub, int n_theta, int n_phi) {
    o.n_theta = n_theta;
    o.n_phi = n_phi;
    sub->add_option("--n-theta", o.n_theta, "Gauss-Legendre nodes in cos(theta) per panel")->capture_default_str();
    sub->add_option("--n-phi", o.n_phi, "Nodes in phi (circle nodes for coplanar)")->capture_default_str();
  };

  auto* evaluate = app.add_subcommand("evaluate", "Quantum value, LHV bound and margin at one visibility");
  evaluate->add_option("--geometry", o.geometry, "sphere or coplanar")->capture_default_str();
  evaluate->add_option("--v", o.v, "Visibility")->required();
  evaluate->add_flag("--optimize-lhv", o.optimize, "Also search LHV strategies numerically");
  evaluate->add_option("--budget", o.budget, "Objective evaluations for --optimize-lhv")->capture_default_str();
  evaluate->add_option("--seed", o.seed, "Seed for --optimize-lhv")->capture_default_str();
  grid_opts(evaluate, 16, 32);

  auto* threshold = app.add_subcommand("threshold", "Critical visibilities");
  threshold->add_option("--geometry", o.threshold_geometry, "sphere, coplanar or all")->capture_default_str();

  auto* optimize = app.add_subcommand("optimize-lhv", "Numerically maximize the LHV value over a strategy family");
  optimize->add_option("--v", o.v, "Visibility")->capture_default_str();
  optimize->add_option("--family", o.family, "hemisphere-pair or harmonic")->capture_default_str();
  optimize->add_option("--degree", o.degree, "Degree for the harmonic family")->capture_default_str();
  optimize->add_option("--budget", o.budget, "Objective evaluations")->capture_default_str();
  optimize->add_option("--seed", o.seed, "Seed for the restart points")->capture_default_str();
  optimize->add_option("--n-theta", o.n_theta)->capture_default_str();
  optimize->add_option("--n-phi", o.n_phi)->capture_default_str();

  auto* discretize = app.add_subcommand("discretize", "Finite-settings functional, LHV maximum and threshold");
  discretize->add_option("--ensemble-a", o.ensemble_a, "Settings file for side A (theta phi [weight])");
  discretize->add_option("--ensemble-b", o.ensemble_b, "Settings file for side B");
  discretize->add_flag("--coplanar", o.coplanar_files, "Weights in the files sum to 2 pi (equatorial settings)");
  discretize->add_option("--quadrature-orders", o.quadrature_orders, "Comma list like 4x8,8x16");
  discretize->add_option("--coplanar-sizes", o.coplanar_sizes, "Comma list of equatorial setting counts");
  discretize->add_option("--random", o.random_size, "Random uniform-weight ensembles with this many settings");
  discretize->add_option("--instances", o.instances, "Number of random instances")->capture_default_str();
  discretize->add_option("--mode", o.mode, "value or threshold")->capture_default_str();
  discretize->add_option("--v", o.v, "Visibility for --mode value")->capture_default_str();
  discretize->add_option("--method", o.method, "auto, brute-force, alternating or both")->capture_default_str();
  discretize->add_option("--restarts", o.restarts, "Random restarts for alternating")->capture_default_str();
  discretize->add_option("--seed", o.seed)->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo events and the estimated functional");
  simulate->add_option("--source", o.source, "quantum or lhv")->capture_default_str();
  simulate->add_option("--source-v", o.source_v, "Visibility of the quantum source")->capture_default_str();
  simulate->add_option("--lhv-model", o.lhv_model, "optimized or antialigned-hemisphere")->capture_default_str();
  simulate->add_option("--v-assumed", o.v_assumed, "Visibility in the functional")->capture_default_str();
  simulate->add_option("--n", o.n_events, "Number of events")->capture_default_str();
  simulate->add_option("--seed", o.seed)->capture_default_str();
  simulate->add_option("--sigma", o.sigma, "Standard errors required for a verdict")->capture_default_str();
  simulate->add_option("--dump", o.dump, "Write events as CSV (plus a .meta.json sidecar)");
  simulate->add_option("--from-file", o.from_file, "Estimate from a previously dumped event CSV");
  simulate->add_flag("--assume-uniform", o.assume_uniform, "Treat a file without sidecar as area-uniform");

  auto* sweep = app.add_subcommand("sweep", "Quantum value, bound and margin over a visibility range (CSV ready)");
  sweep->add_option("--geometry", o.geometry, "sphere or coplanar")->capture_default_str();
  sweep->add_option("--v-min", o.v_min)->capture_default_str();
  sweep->add_option("--v-max", o.v_max)->capture_default_str();
  sweep->add_option("--steps", o.steps)->capture_default_str();
  grid_opts(sweep, 8, 16);

  // The grid defaults differ per subcommand; reset them before parsing the chosen one.
  evaluate->preparse_callback([&](std::size_t) {
    o.n_theta = 16;
    o.n_phi = 32;
  });
  sweep->preparse_callback([&](std::size_t) {
    o.n_theta = 8;
    o.n_phi = 16;
  });
  optimize->preparse_callback([&](std::size_t) {
    o.n_theta = 8;
    o.n_phi = 16;
  });

  try {
    std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(reversed.begin(), reversed.end());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "funcbell: " << e.what() << "\n";
    return kExitUsage;
  }

  const Format format = o.format == "csv" ? Format::csv : o.format == "jsonl" ? Format::jsonl : Format::human;
  set_max_threads(o.threads);

  try {
    std::vector<Record> rows;
    if (evaluate->parsed()) rows = cmd_evaluate(o);
    if (threshold->parsed()) rows = cmd_threshold(o);
    if (optimize->parsed()) rows = cmd_optimize(o);
    if (discretize->parsed()) rows = cmd_discretize(o);
    if (simulate->parsed()) rows = cmd_simulate(o);
    if (sweep->parsed()) rows = cmd_sweep(o);
    emit(rows, format, out);
  } catch (const InputFileError& e) {
    err << "funcbell: " << e.what() << "\n";
    return kExitInputFile;
  } catch (const std::invalid_argument& e) {
    err << "funcbell: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace funcbell::cli
