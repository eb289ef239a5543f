#include <cmath>
#include <stdexcept>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "funcbell/parallel.hpp"
#include "funcbell/simulate.hpp"

using namespace funcbell;
using std::numbers::pi;

namespace {

const Direction kZ(0, 0);

LhvModel antialigned() {
  return LhvModel::single(ResponseStrategy::hemisphere(kZ), ResponseStrategy::hemisphere(Direction(pi, 0)));
}

double sign_of(double x) { return x >= 0 ? 1.0 : -1.0; }

}  // namespace

TEST_CASE("equal settings give perfect anti-correlation") {
  const auto e = SettingEnsemble::uniform({Direction(1.1, 0.4)}, EnsembleGeometry::full_sphere);
  const auto s = generate_events(QuantumSource{Visibility(1)}, EnsembleSampler{e, e}, 5000, 3);
  CHECK(s.events.size() == 5000);
  CHECK_FALSE(s.metadata.area_uniform);
  for (const auto& ev : s.events) CHECK(ev.m_b == -ev.m_a);
  CHECK_THROWS_AS(estimate_functional(s, Visibility(1)), std::invalid_argument);
}

TEST_CASE("zero visibility gives independent fair coins") {
  const std::uint64_t n = 200000;
  const auto s = generate_events(QuantumSource{Visibility(0)}, UniformSphereSampler{}, n, 4);
  double ma = 0, mb = 0, corr = 0;
  for (const auto& ev : s.events) {
    ma += ev.m_a;
    mb += ev.m_b;
    corr += ev.m_a * ev.m_b;
  }
  const double bound = 4 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(ma / n) < bound);
  CHECK(std::abs(mb / n) < bound);
  CHECK(std::abs(corr / n) < bound);
}

TEST_CASE("quantum source reproduces the singlet correlation") {
  const std::uint64_t n = 400000;
  const auto s = generate_events(QuantumSource{Visibility(0.7)}, UniformSphereSampler{}, n, 8);
  // E[m m' a.b] = -v E[(a.b)^2] = -v / 3
  double acc = 0;
  for (const auto& ev : s.events) acc += ev.m_a * ev.m_b * dot(ev.a, ev.b);
  CHECK(acc / n == doctest::Approx(-0.7 / 3).epsilon(0.03));
}

TEST_CASE("deterministic LHV source") {
  const auto model = LhvModel::single(ResponseStrategy::hemisphere(kZ), ResponseStrategy::hemisphere(kZ));
  const auto s = generate_events(LhvSource{model}, UniformSphereSampler{}, 20000, 5);
  for (const auto& ev : s.events) {
    CHECK(ev.m_a == sign_of(ev.a[2]));
    CHECK(ev.m_b == sign_of(ev.b[2]));
  }
}

TEST_CASE("uniform sampler is area-uniform") {
  const std::uint64_t n = 200000;
  const auto s = generate_events(QuantumSource{Visibility(1)}, UniformSphereSampler{}, n, 6);
  CHECK(s.metadata.area_uniform);
  double z = 0, z2 = 0;
  for (const auto& ev : s.events) {
    z += ev.a[2];
    z2 += ev.b[2] * ev.b[2];
  }
  CHECK(std::abs(z / n) < 4 * std::sqrt(1.0 / 3 / n));
  CHECK(z2 / n == doctest::Approx(1.0 / 3).epsilon(0.01));
}

TEST_CASE("estimator at the examples") {
  const std::uint64_t n = 1000000;
  const auto q = estimate_functional(generate_events(QuantumSource{Visibility(1)}, UniformSphereSampler{}, n, 42),
                                     Visibility(1));
  CHECK(std::abs(q.functional_estimate - 52.63789) < 3 * q.std_error);
  CHECK(q.verdict == Verdict::violation);
  CHECK(q.lhv_bound == doctest::Approx(49.34802).epsilon(1e-7));
  CHECK(q.std_error > 0.0);
  CHECK(q.std_error < 0.05);
  CHECK(q.significance == doctest::Approx((q.functional_estimate - q.lhv_bound) / q.std_error));

  const auto l = estimate_functional(generate_events(LhvSource{antialigned()}, UniformSphereSampler{}, n, 42),
                                     Visibility(1));
  CHECK(std::abs(l.functional_estimate - 49.34802) < 3 * l.std_error);
  CHECK(l.verdict == Verdict::no_violation);

  const auto small = estimate_functional(generate_events(QuantumSource{Visibility(1)}, UniformSphereSampler{}, 100, 1),
                                         Visibility(1));
  CHECK(small.std_error > 0.5);

  const auto few = generate_events(QuantumSource{Visibility(1)}, UniformSphereSampler{}, 99, 1);
  CHECK_THROWS_AS(estimate_functional(few, Visibility(1)), std::invalid_argument);
}

TEST_CASE("estimator is unbiased for mismatched visibilities") {
  const double v = 0.6, v_assumed = 0.9;
  const double expect = 4 * pi * pi * (1 + v * v_assumed / 3);
  double sum = 0, sum_var = 0;
  const int runs = 50;
  for (int r = 0; r < runs; ++r) {
    const auto rep = estimate_functional(
        generate_events(QuantumSource{Visibility(v)}, UniformSphereSampler{}, 100000, 1000 + r), Visibility(v_assumed));
    sum += rep.functional_estimate;
    sum_var += rep.std_error * rep.std_error;
  }
  const double grand = sum / runs;
  const double grand_err = std::sqrt(sum_var) / runs;
  CHECK(std::abs(grand - expect) < 4 * grand_err);
}

TEST_CASE("verdict rules") {
  // quantum source at the threshold: the estimate sits on the bound
  const auto r = estimate_functional(
      generate_events(QuantumSource{Visibility(0.75)}, UniformSphereSampler{}, 200000, 9), Visibility(0.75));
  CHECK(std::abs(r.significance) < 4.0);
  CHECK(r.verdict == Verdict::inconclusive);
  CHECK(to_string(Verdict::no_violation) == "no-violation");

  const auto strict = estimate_functional(
      generate_events(QuantumSource{Visibility(1)}, UniformSphereSampler{}, 100000, 9), Visibility(1), 1000.0);
  CHECK(strict.verdict == Verdict::inconclusive);
  CHECK(strict.sigma_threshold == 1000.0);
}

TEST_CASE("streams do not depend on the thread count") {
  set_max_threads(1);
  const auto a = generate_events(QuantumSource{Visibility(0.9)}, UniformSphereSampler{}, 30000, 77);
  const auto ra = estimate_functional(a, Visibility(0.9));
  set_max_threads(8);
  const auto b = generate_events(QuantumSource{Visibility(0.9)}, UniformSphereSampler{}, 30000, 77);
  const auto rb = estimate_functional(b, Visibility(0.9));
  set_max_threads(0);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].a == b.events[i].a);
    CHECK(a.events[i].b == b.events[i].b);
    CHECK(a.events[i].m_a == b.events[i].m_a);
    CHECK(a.events[i].m_b == b.events[i].m_b);
  }
  CHECK(ra.functional_estimate == rb.functional_estimate);
  CHECK(ra.std_error == rb.std_error);

  const auto c = generate_events(QuantumSource{Visibility(0.9)}, UniformSphereSampler{}, 30000, 78);
  CHECK_FALSE(c.events[0].a == a.events[0].a);
}

TEST_CASE("csv round trip") {
  const auto s = generate_events(LhvSource{antialigned()}, UniformSphereSampler{}, 1000, 12);
  std::stringstream csv;
  write_events_csv(s, csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "theta_a,phi_a,theta_b,phi_b,m_a,m_b");
  csv.seekg(0);
  auto back = read_events_csv(csv);
  REQUIRE(back.events.size() == s.events.size());

  std::stringstream meta;
  write_metadata(s.metadata, meta);
  back.metadata = read_metadata(meta);
  CHECK(back.metadata.seed == 12);
  CHECK(back.metadata.n == 1000);
  CHECK(back.metadata.area_uniform);
  CHECK(back.metadata.source == s.metadata.source);

  const auto rounded = at_csv_precision(s);
  const auto e1 = estimate_functional(rounded, Visibility(1));
  const auto e2 = estimate_functional(back, Visibility(1));
  CHECK(e1.functional_estimate == e2.functional_estimate);
  CHECK(e1.std_error == e2.std_error);
  CHECK(metadata_path("run/events.csv") == std::filesystem::path("run/events.csv.meta.json"));

  std::istringstream bad("theta_a,phi_a,theta_b,phi_b,m_a,m_b\n0.1,0.2,0.3,0.4,1,-1\n0.1,0.2,0.3,0.4,0,1\n");
  try {
    read_events_csv(bad);
    FAIL("expected an event file error");
  } catch (const EventFileError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream no_header("0.1,0.2,0.3,0.4,1,-1\n");
  CHECK_THROWS_AS(read_events_csv(no_header), EventFileError);
}
