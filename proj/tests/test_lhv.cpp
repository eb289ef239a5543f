#include <cmath>
#include <stdexcept>
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "funcbell/lhv.hpp"

using namespace funcbell;
using std::numbers::pi;

namespace {

const double kTwoPiSq = 4 * pi * pi;
const Direction kZ(0, 0);
const Direction kMinusZ(pi, 0);

LhvModel pair(ResponseStrategy a, ResponseStrategy b) { return LhvModel::single(std::move(a), std::move(b)); }

ResponseStrategy random_harmonic(std::mt19937_64& rng, int degree, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> c(harmonic_monomials(degree).size());
  for (double& x : c) x = u(rng);
  return ResponseStrategy::harmonic(degree, c);
}

}  // namespace

TEST_CASE("strategy evaluation") {
  const auto h = ResponseStrategy::hemisphere(kZ);
  CHECK(h.evaluate(Direction(0.3, 1.0)) == 1.0);
  CHECK(h.evaluate(Direction(2.9, 1.0)) == -1.0);
  CHECK(h.evaluate(Direction(pi / 2, 1.0)) == 1.0);  // sign(0) = +1
  CHECK(ResponseStrategy::linear(kZ).evaluate(Direction(pi / 3, 0)) == doctest::Approx(0.5));

  const auto big = ResponseStrategy::harmonic(1, {0.0, 0.0, 0.0, 3.0});
  CHECK(big.evaluate(kZ) == 1.0);
  CHECK(big.raw(kZ) == doctest::Approx(3.0));
  const double excess = big.clip_violation(build_grid(8, 16));
  CHECK(excess > 1.9);
  CHECK(excess < 2.0);
  CHECK_THROWS_AS(ResponseStrategy::harmonic(1, {1.0}), std::invalid_argument);
  CHECK(ResponseStrategy::constant(0.25).evaluate(Direction(1, 1)) == 0.25);

  const auto monomials = harmonic_monomials(2);
  CHECK(monomials.size() == 10);
  CHECK(monomials[1] == std::array<int, 3>{1, 0, 0});
  CHECK(monomials[3] == std::array<int, 3>{0, 0, 1});

  auto grid = std::make_shared<const QuadratureGrid>(build_grid(4, 8));
  std::vector<double> vals(grid->size(), 0.0);
  vals[5] = 7.0;
  const auto tab = ResponseStrategy::tabulated(grid, vals);
  CHECK(tab.evaluate(grid->nodes()[5]) == 1.0);
  CHECK(tab.evaluate(grid->nodes()[6]) == 0.0);
  CHECK_THROWS(ResponseStrategy::tabulated(grid, std::vector<double>(3)));
}

TEST_CASE("projection examples") {
  const auto g = build_grid(16, 32);
  const auto hz = project(ResponseStrategy::hemisphere(kZ), g).alpha;
  CHECK(std::abs(hz[0]) < 1e-12);
  CHECK(std::abs(hz[1]) < 1e-12);
  CHECK(hz[2] == doctest::Approx(std::sqrt(3 * pi)).epsilon(1e-12));

  const auto c = project(ResponseStrategy::constant(1.0), g).alpha;
  CHECK(norm(c) < 1e-12);

  const auto lz = project(ResponseStrategy::linear(kZ), g).alpha;
  CHECK(lz[2] == doctest::Approx(std::sqrt(4 * pi / 3)).epsilon(1e-12));
  CHECK(lz[2] == doctest::Approx(2.04665).epsilon(1e-5));

  CHECK(projection_norm_bound() == doctest::Approx(3.069980124).epsilon(1e-9));
  CHECK(projection_norm_bound() == doctest::Approx(2 * pi * std::sqrt(3 / (4 * pi))).epsilon(1e-15));
}

TEST_CASE("hemisphere projections saturate the bound for any axis, linear ones do not") {
  std::mt19937_64 rng(17);
  const auto g = build_grid(16, 32);
  for (int i = 0; i < 50; ++i) {
    const Direction c = random_direction(rng);
    const auto h = project(ResponseStrategy::hemisphere(c), g);
    CHECK(h.norm() == doctest::Approx(projection_norm_bound()).epsilon(1e-12));
    CHECK(dot(h.alpha, c.cartesian()) == doctest::Approx(projection_norm_bound()).epsilon(1e-12));
    CHECK(project(ResponseStrategy::linear(c), g).norm() < projection_norm_bound());
  }
}

TEST_CASE("functional value examples") {
  const auto g = build_grid(16, 32);
  const auto hz = ResponseStrategy::hemisphere(kZ);
  const auto hmz = ResponseStrategy::hemisphere(kMinusZ);
  for (double v : {0.0, 0.3, 0.75, 1.0}) {
    CHECK(lhv_functional_value(pair(hz, hmz), Visibility(v), g) ==
          doctest::Approx(kTwoPiSq * (1 + v / 4)).epsilon(1e-13));
  }
  CHECK(lhv_functional_value(pair(hz, hz), Visibility(1), g) == doctest::Approx(kTwoPiSq - pi * pi).epsilon(1e-13));

  auto grid = std::make_shared<const QuadratureGrid>(build_grid(4, 8));
  const auto zero = ResponseStrategy::tabulated(grid, std::vector<double>(grid->size(), 0.0));
  CHECK(lhv_functional_value(pair(hz, zero), Visibility(1), g) == doctest::Approx(kTwoPiSq).epsilon(1e-14));

  CHECK(lhv_bound_analytic(Visibility(1)) == doctest::Approx(49.34802).epsilon(1e-7));
  CHECK(lhv_bound_analytic(Visibility(0)) == doctest::Approx(kTwoPiSq));
  CHECK(std::abs(lhv_bound_analytic(Visibility(0.75)) - norm_sq_qm_analytic(Visibility(0.75))) < 1e-12);
}

TEST_CASE("fast path agrees with direct quadrature") {
  std::mt19937_64 rng(23);
  const auto g = build_grid(8, 16);
  const Visibility v(0.9);
  SUBCASE("smooth strategies: both paths are exact") {
    for (int i = 0; i < 10; ++i) {
      const auto model = pair(random_harmonic(rng, 1, 0.4), random_harmonic(rng, 2, 0.25));
      CHECK(std::abs(lhv_functional_value(model, v, g) - lhv_functional_value_direct(model, v, g)) < 1e-10);
    }
    const auto model = pair(ResponseStrategy::linear(random_direction(rng)),
                            ResponseStrategy::linear(random_direction(rng)));
    CHECK(std::abs(lhv_functional_value(model, v, g) - lhv_functional_value_direct(model, v, g)) < 1e-10);
  }
  SUBCASE("pole-aligned hemispheres: kink on the panel edge") {
    for (const auto& model : {pair(ResponseStrategy::hemisphere(kZ), ResponseStrategy::hemisphere(kMinusZ)),
                              pair(ResponseStrategy::hemisphere(kZ), ResponseStrategy::hemisphere(kZ))}) {
      CHECK(std::abs(lhv_functional_value(model, v, g) - lhv_functional_value_direct(model, v, g)) < 1e-10);
    }
  }
  SUBCASE("random hemispheres: direct path converges to the fast path") {
    for (int i = 0; i < 3; ++i) {
      const auto model = pair(ResponseStrategy::hemisphere(random_direction(rng)),
                              ResponseStrategy::hemisphere(random_direction(rng)));
      const double fast = lhv_functional_value(model, v, g);
      const double coarse = std::abs(lhv_functional_value_direct(model, v, build_grid(8, 16)) - fast);
      const double fine = std::abs(lhv_functional_value_direct(model, v, build_grid(16, 32)) - fast);
      const double finest = std::abs(lhv_functional_value_direct(model, v, build_grid(32, 64)) - fast);
      CHECK(std::min(coarse, fine) < 0.05);
      CHECK(finest < 0.02);
    }
  }
}

TEST_CASE("mixtures are linear") {
  std::mt19937_64 rng(29);
  const auto g = build_grid(8, 16);
  const Visibility v(0.6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LhvModel::Member> members;
    std::vector<double> w = {0.2, 0.5, 0.3};
    double expect = 0.0;
    for (double wi : w) {
      auto a = ResponseStrategy::hemisphere(random_direction(rng));
      auto b = random_harmonic(rng, 1, 1.0);
      expect += wi * lhv_functional_value(pair(a, b), v, g);
      members.push_back({wi, a, b});
    }
    CHECK(std::abs(lhv_functional_value(LhvModel(members), v, g) - expect) < 1e-12);
  }
  CHECK_THROWS_AS(LhvModel({{0.5, ResponseStrategy::hemisphere(kZ), ResponseStrategy::hemisphere(kZ)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(LhvModel({}), std::invalid_argument);
  CHECK_THROWS_AS(LhvModel({{1.5, ResponseStrategy::hemisphere(kZ), ResponseStrategy::hemisphere(kZ)},
                            {-0.5, ResponseStrategy::hemisphere(kZ), ResponseStrategy::hemisphere(kZ)}}),
                  std::invalid_argument);
}

TEST_CASE("joint probabilities of a model") {
  const auto model = pair(ResponseStrategy::hemisphere(kZ), ResponseStrategy::hemisphere(kMinusZ));
  const Direction up(0.2, 0), down(2.8, 0);
  CHECK(model.joint_probability(1, -1, up, up) == 1.0);
  CHECK(model.joint_probability(1, 1, up, up) == 0.0);
  CHECK(model.joint_probability(-1, 1, down, down) == 1.0);
}

TEST_CASE("bound safety and the Schwartz step over random models") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto g = build_grid(8, 16);
  const double grid_error = 1e-9;
  for (int trial = 0; trial < 1000; ++trial) {
    const Visibility v(u(rng));
    const int kind = trial % 3;
    std::vector<LhvModel::Member> members;
    const int count = kind == 2 ? 3 : 1;
    double total = 0.0;
    for (int k = 0; k < count; ++k) {
      const double w = kind == 2 ? u(rng) + 0.1 : 1.0;
      total += w;
      if (kind == 0 || (kind == 2 && k % 2 == 0)) {
        members.push_back({w, ResponseStrategy::hemisphere(random_direction(rng)),
                           ResponseStrategy::hemisphere(random_direction(rng))});
      } else {
        members.push_back({w, random_harmonic(rng, 2, 1.5), random_harmonic(rng, 1, 1.5)});
      }
    }
    for (auto& m : members) m.weight /= total;
    double wsum = 0.0;
    for (std::size_t k = 0; k + 1 < members.size(); ++k) wsum += members[k].weight;
    members.back().weight = 1.0 - wsum;

    for (const auto& m : members) {
      const auto a = project(m.side_a, g), b = project(m.side_b, g);
      CHECK(dot(a.alpha, b.alpha) <= a.norm() * b.norm() + 1e-12);
    }
    CHECK(lhv_functional_value(LhvModel(members), v, g) <= lhv_bound_analytic(v) + 10 * grid_error);
  }
}

TEST_CASE("optimizer") {
  const auto g = build_grid(8, 16);
  SUBCASE("hemisphere pair reaches the bound at anti-aligned axes") {
    const auto r = optimize_lhv(Visibility(1), StrategyFamily::hemisphere_pair(), g, 2000, 1);
    CHECK(r.value >= lhv_bound_analytic(Visibility(1)) - 1e-4);
    CHECK(r.value <= lhv_bound_analytic(Visibility(1)) + 1e-9);
    CHECK(r.restarts == kOptimizeRestarts);
    CHECK(r.evaluations <= 2000);
    CHECK(r.grid_error < 1e-9);
    const auto& m = r.model.members()[0];
    const Direction ca = *m.side_a.symmetry_axis(), cb = *m.side_b.symmetry_axis();
    CHECK(dot(ca, cb) == doctest::Approx(-1.0).epsilon(1e-4));

    std::mt19937_64 rng(41);
    for (int i = 0; i < 5; ++i) {
      const Rotation rot = Rotation::random(rng);
      const auto turned = pair(m.side_a.rotated(rot), m.side_b.rotated(rot));
      CHECK(std::abs(lhv_functional_value(turned, Visibility(1), g) - r.value) < 1e-6);
    }
  }
  SUBCASE("deterministic for a seed") {
    const auto a = optimize_lhv(Visibility(0.8), StrategyFamily::hemisphere_pair(), g, 300, 9);
    const auto b = optimize_lhv(Visibility(0.8), StrategyFamily::hemisphere_pair(), g, 300, 9);
    CHECK(a.value == b.value);
    CHECK(a.evaluations == b.evaluations);
  }
  SUBCASE("clipped harmonics stay below the hemisphere optimum") {
    const auto r = optimize_lhv(Visibility(1), StrategyFamily::harmonic(1), g, 1500, 2);
    CHECK(r.value <= lhv_bound_analytic(Visibility(1)) + r.grid_error + 1e-9);
    CHECK(r.value > kTwoPiSq);
  }
  SUBCASE("v = 0 is flat") {
    CHECK(optimize_lhv(Visibility(0), StrategyFamily::hemisphere_pair(), g, 200, 1).value ==
          doctest::Approx(kTwoPiSq).epsilon(1e-14));
    CHECK(optimize_lhv(Visibility(0), StrategyFamily::harmonic(2), g, 200, 1).value ==
          doctest::Approx(kTwoPiSq).epsilon(1e-14));
  }
  CHECK_THROWS_AS(optimize_lhv(Visibility(1), StrategyFamily::hemisphere_pair(), g, 99, 1), std::invalid_argument);
}
