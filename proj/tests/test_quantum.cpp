#include <cmath>
#include <stdexcept>
#include <numbers>
#include <random>

#include "doctest.h"
#include "funcbell/quantum.hpp"

using namespace funcbell;
using std::numbers::pi;

TEST_CASE("visibility and outcome validation") {
  CHECK_THROWS_AS(Visibility(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(Visibility(1.0001), std::invalid_argument);
  CHECK_THROWS_AS(Visibility(NAN), std::invalid_argument);
  CHECK_NOTHROW(Visibility(0.0));
  CHECK_NOTHROW(Visibility(1.0));
  CHECK_THROWS_AS(check_outcome(0), std::invalid_argument);
  CHECK_THROWS_AS(p_qm(2, 1, Direction(), Direction(), Visibility(1)), std::invalid_argument);
}

TEST_CASE("normalization, marginals and correlation at random triples") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const Direction a = random_direction(rng), b = random_direction(rng);
    const Visibility v(u(rng));
    double total = 0.0, corr = 0.0;
    for (int m : {-1, 1}) {
      double marg_a = 0.0, marg_b = 0.0;
      for (int mp : {-1, 1}) {
        const double p = p_qm(m, mp, a, b, v);
        CHECK(p >= 0.0);
        total += p;
        corr += m * mp * p;
        marg_a += p;
        marg_b += p_qm(mp, m, a, b, v);
      }
      CHECK(marg_a == doctest::Approx(0.5).epsilon(1e-15));
      CHECK(marg_b == doctest::Approx(0.5).epsilon(1e-15));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(corr == doctest::Approx(correlation_qm(a, b, v)).epsilon(1e-14));
    CHECK(correlation_qm(a, b, v) == doctest::Approx(-v.value() * dot(a, b)).epsilon(1e-15));
  }
}

TEST_CASE("perfect anti-correlation at equal settings") {
  const Direction a(0.4, 2.2);
  CHECK(p_qm(1, 1, a, a, Visibility(1)) == doctest::Approx(0.0));
  CHECK(p_qm(1, -1, a, a, Visibility(1)) == doctest::Approx(0.5));
}

TEST_CASE("rotational covariance") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Direction a = random_direction(rng), b = random_direction(rng);
    const Rotation r = Rotation::random(rng);
    const Visibility v(0.8);
    for (int m : {-1, 1})
      for (int mp : {-1, 1})
        CHECK(std::abs(p_qm(m, mp, r.apply(a), r.apply(b), v) - p_qm(m, mp, a, b, v)) < 1e-12);
  }
}

TEST_CASE("analytic norm") {
  CHECK(norm_sq_qm_analytic(Visibility(0)) == doctest::Approx(39.47841760).epsilon(1e-9));
  CHECK(norm_sq_qm_analytic(Visibility(1)) == doctest::Approx(52.63789014).epsilon(1e-9));
  CHECK(norm_sq_qm_analytic(Visibility(0.75)) == doctest::Approx(46.88062091).epsilon(1e-9));
}

TEST_CASE("numeric norm against the closed form") {
  const auto g = build_grid(16, 32);
  CHECK(std::abs(norm_sq_qm_numeric(Visibility(1), g) - 52.63789014) < 1e-8);
  CHECK(std::abs(norm_sq_qm_numeric(Visibility(1), g) - norm_sq_qm_analytic(Visibility(1))) < 1e-9);
  CHECK(std::abs(norm_sq_qm_numeric(Visibility(0.5), g) - 4 * pi * pi * (1 + 1.0 / 12)) < 1e-9);
  CHECK(std::abs(norm_sq_qm_numeric(Visibility(0), build_grid(2, 4)) - 4 * pi * pi) < 1e-10);
  // the integrand is a degree-2 polynomial in each direction, so even coarse grids are exact
  CHECK(std::abs(norm_sq_qm_numeric(Visibility(1), build_grid(2, 4)) - 52.63789013914324) < 1e-9);
}

TEST_CASE("quantum prediction callable") {
  const QuantumPrediction q{Visibility(0.3)};
  const Direction a(0.2, 0.1), b(2.0, 4.0);
  CHECK(q(1, -1, a, b) == p_qm(1, -1, a, b, Visibility(0.3)));
}
