// Copyright 2026 The invrisk Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <random>

#include "invrisk/riskmeasures.hpp"
#include "oracles.hpp"

using namespace invrisk;

namespace {

DiscreteDistribution uniform_dist(const std::vector<double>& v) {
  return distribution_of(RandomLoss(
      Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())),
      OutcomeSpace::uniform(static_cast<int>(v.size()))));
}

ReferenceMeasure rho_spec() { return mix_to_spectral(0.2, Rational(9, 10)); }

std::vector<ReferenceMeasure> sample_measures() {
  return {
      {MaxLoss{}},
      {Expectation{}},
      {MeanAbsDev{0.3}},
      {MeanUpperSemidev{0.5}},
      {CVaR{Rational(3, 4)}},
      rho_spec(),
      {Entropic{2.0}},
      {Mix{{0.5, 0.5}, {{Expectation{}}, {CVaR{Rational(1, 2)}}}}},
  };
}

DiscreteDistribution random_dist(std::mt19937_64& rng, int atoms) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> c(1, 4);
  std::vector<double> v(atoms);
  std::vector<std::int64_t> n(atoms);
  std::int64_t total = 0;
  for (int i = 0; i < atoms; ++i) {
    v[i] = u(rng);
    total += (n[i] = c(rng));
  }
  std::vector<Rational> p(atoms);
  for (int i = 0; i < atoms; ++i) p[i] = Rational(n[i], total);
  return {v, p};
}

std::vector<double> as_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("evaluation examples") {
  CHECK(evaluate({MaxLoss{}}, uniform_dist({1, 3, 2})) == 3.0);
  DiscreteDistribution e({std::log(2.0), std::log(4.0)}, {Rational(1, 2), Rational(1, 2)});
  CHECK(evaluate({Entropic{1.0}}, e) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(oracle::entropic_oce(1.0, as_std(e.support()), as_std(e.probs_as_double())) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-10));

  auto x1 = uniform_dist({-0.0325, 0.0755});
  CHECK(evaluate({CVaR{Rational(9, 10)}}, x1) == doctest::Approx(0.0755).epsilon(1e-10));
  CHECK(oracle::cvar_ru(0.9, {-0.0325, 0.0755}, {0.5, 0.5}) == doctest::Approx(0.0755));
  CHECK(evaluate(rho_spec(), x1) == doctest::Approx(0.2 * 0.0215 + 0.8 * 0.0755).epsilon(1e-10));
  CHECK(evaluate(rho_spec(), x1) == doctest::Approx(0.0647).epsilon(1e-10));
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(validate({MeanAbsDev{0.6}}), Error);
  CHECK_THROWS_AS(validate({CVaR{Rational(1)}}), Error);
  CHECK_THROWS_AS(validate({Entropic{0.0}}), Error);
  StepwiseSpectral bad{Eigen::Vector2d(0.5, 2.0), {Rational(0), Rational(1, 2), Rational(1)}};
  CHECK_THROWS_AS(validate({bad}), Error);  // integrates to 1.25
  StepwiseSpectral down{Eigen::Vector2d(1.5, 0.5), {Rational(0), Rational(1, 2), Rational(1)}};
  CHECK_THROWS_AS(validate({down}), Error);
  CHECK_THROWS_AS(validate({MeanUpperSemidev{0.5, 3}}), Error);
}

TEST_CASE("reduced subgradient sets") {
  std::vector<Rational> half{Rational(1, 2), Rational(1, 2)};
  DiscreteDistribution d({0.0, 1.0}, half);
  auto cv = reduced_subgradient_set({CVaR{Rational(1, 2)}}, d);
  CHECK(std::holds_alternative<CVaRBox>(cv.set));
  CHECK(support_function(cv, Eigen::Vector2d(1, 0)) == doctest::Approx(1.0));
  CHECK(support_function(cv, Eigen::Vector2d(-1, 0)) == doctest::Approx(0.0));

  auto ex = reduced_subgradient_set({Expectation{}}, d);
  REQUIRE(std::holds_alternative<Singleton>(ex.set));
  CHECK(std::get<Singleton>(ex.set).point.isApprox(Eigen::Vector2d(0.5, 0.5)));

  // Extreme points (0.1, 0.9) and (0.9, 0.1).
  auto sp = reduced_subgradient_set(rho_spec(), d);
  CHECK(std::holds_alternative<TransportationPolytope>(sp.set));
  CHECK(support_function(sp, Eigen::Vector2d(1, 0)) == doctest::Approx(0.9));
  CHECK(support_function(sp, Eigen::Vector2d(-1, 0)) == doctest::Approx(-0.1));
  CHECK(support_function(sp, Eigen::Vector2d(1, 1)) == doctest::Approx(1.0));

  CHECK(std::holds_alternative<FullSimplex>(reduced_subgradient_set({MaxLoss{}}, d).set));
  CHECK(std::holds_alternative<SemidevSOC>(reduced_subgradient_set({MeanUpperSemidev{0.4}}, d).set));
  try {
    reduced_subgradient_set({Entropic{1.0}}, d);
    FAIL("expected UnsupportedMeasure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedMeasure);
  }
}

TEST_CASE("lifted subgradient sets") {
  auto mx = lifted_subgradient_set({MaxLoss{}}, 3);
  CHECK(support_function(mx, Eigen::Vector3d(1, 3, 2)) == doctest::Approx(3.0));
  auto cv = lifted_subgradient_set({CVaR{Rational(1, 2)}}, 2);
  CHECK(support_function(cv, Eigen::Vector2d(5, -1)) == doctest::Approx(5.0));
  auto ex = lifted_subgradient_set({Expectation{}}, 2);
  CHECK(support_function(ex, Eigen::Vector2d(5, -1)) == doctest::Approx(2.0));
  try {
    lifted_subgradient_set(rho_spec(), 3);
    FAIL("expected IncompatibleM");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompatibleM);
  }
}

TEST_CASE("spectral constructors") {
  auto c9 = std::get<StepwiseSpectral>(cvar_as_spectral(Rational(9, 10)).m);
  CHECK(c9.levels.size() == 2);
  CHECK(c9.levels[0] == 0.0);
  CHECK(c9.levels[1] == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(c9.breakpoints[1] == Rational(9, 10));

  auto c0 = cvar_as_spectral(Rational(0));
  auto c5 = cvar_as_spectral(Rational(1, 2));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    auto d = random_dist(rng, 4);
    CHECK(evaluate(c0, d) == doctest::Approx(evaluate({Expectation{}}, d)).epsilon(1e-10));
    auto u = uniform_dist({d.support()[0], d.support()[1]});
    CHECK(evaluate(c5, u) == doctest::Approx(evaluate({MaxLoss{}}, u)).epsilon(1e-10));
  }

  auto s = std::get<StepwiseSpectral>(rho_spec().m);
  CHECK(s.levels[0] == doctest::Approx(0.2));
  CHECK(s.levels[1] == doctest::Approx(8.2));
  auto one = std::get<StepwiseSpectral>(mix_to_spectral(1.0, Rational(9, 10)).m);
  CHECK(one.levels.size() == 1);
  CHECK(one.levels[0] == 1.0);
  auto zero = std::get<StepwiseSpectral>(mix_to_spectral(0.0, Rational(9, 10)).m);
  CHECK(zero.levels == c9.levels);
}

TEST_CASE("property: evaluation equals the support function of the reduced set") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto d = random_dist(rng, 1 + trial % 5);
    for (const auto& m : sample_measures()) {
      if (!m.has_subgradient_set()) continue;
      auto c = reduced_subgradient_set(m, d);
      CHECK(evaluate(m, d) == doctest::Approx(support_function(c, d.support())).epsilon(1e-8));
    }
    // Closed-form cross-checks, written out from the defining formulas.
    auto p = d.probs_as_double();
    const auto& s = d.support();
    double mean = p.dot(s);
    double mad = p.dot((s.array() - mean).abs().matrix());
    CHECK(evaluate({MeanAbsDev{0.3}}, d) == doctest::Approx(mean + 0.3 * mad).epsilon(1e-12));
    double up = std::sqrt(p.dot((s.array() - mean).max(0.0).square().matrix()));
    CHECK(evaluate({MeanUpperSemidev{0.5}}, d) == doctest::Approx(mean + 0.5 * up).epsilon(1e-12));
    CHECK(evaluate({CVaR{Rational(3, 4)}}, d) ==
          doctest::Approx(oracle::cvar_ru(0.75, as_std(s), as_std(p))).epsilon(1e-10));
    CHECK(evaluate({Entropic{2.0}}, d) ==
          doctest::Approx(oracle::entropic_oce(2.0, as_std(s), as_std(p))).epsilon(1e-9));
  }
}

TEST_CASE("property: spectral LP equals the sorted dot product on uniform spaces") {
  std::mt19937_64 rng(23);
  auto spec = std::get<StepwiseSpectral>(rho_spec().m);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 10 * (1 + trial % 3);
    auto z = oracle::random_vector(rng, m);
    auto w = oracle::spectrum_weights({0.2, 8.2}, {0.0, 0.9, 1.0}, m);
    RandomLoss loss(z, OutcomeSpace::uniform(m));
    double lp = support_function(lifted_subgradient_set(rho_spec(), m), z);
    CHECK(lp == doctest::Approx(oracle::sorted_dot(as_std(z), w)).epsilon(1e-8));
    CHECK(evaluate(rho_spec(), loss) == doctest::Approx(lp).epsilon(1e-8));
    auto phi = discretized_spectrum(spec, m);
    for (int i = 0; i < m; ++i) CHECK(phi[i] == doctest::Approx(w[i]).epsilon(1e-12));
  }
}

TEST_CASE("property: translation, homogeneity, normalization") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-2, 2), pos(0.1, 3);
  for (int trial = 0; trial < 50; ++trial) {
    auto d = random_dist(rng, 1 + trial % 4);
    double c = u(rng), a = pos(rng);
    std::vector<double> shifted, scaled;
    for (int i = 0; i < d.size(); ++i) {
      shifted.push_back(d.support()[i] + c);
      scaled.push_back(d.support()[i] * a);
    }
    DiscreteDistribution ds(shifted, d.probs()), da(scaled, d.probs());
    for (const auto& m : sample_measures()) {
      CAPTURE(m.name());
      double base = evaluate(m, d);
      CHECK(evaluate(m, DiscreteDistribution::dirac(c)) == doctest::Approx(c).epsilon(1e-10));
      CHECK(evaluate(m, ds) == doctest::Approx(base + c).epsilon(1e-9));
      if (!std::holds_alternative<Entropic>(m.m))
        CHECK(evaluate(m, da) == doctest::Approx(a * base).epsilon(1e-9));
    }
  }
  auto d = random_dist(rng, 5);
  CHECK(std::abs(evaluate({Entropic{1e-6}}, d) - d.mean()) <= 1e-4);
}

TEST_CASE("property: monotonicity and midpoint convexity") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> gap(0, 0.5);
  auto measures = sample_measures();
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 2 + trial % 4;
    auto sp = OutcomeSpace::uniform(m);
    Eigen::VectorXd z1 = oracle::random_vector(rng, m), z2 = oracle::random_vector(rng, m);
    Eigen::VectorXd hi = z1;
    for (int i = 0; i < m; ++i) hi[i] += gap(rng);
    const auto& meas = measures[trial % measures.size()];
    CAPTURE(meas.name());
    CHECK(evaluate(meas, RandomLoss(hi, sp)) >= evaluate(meas, RandomLoss(z1, sp)) - 1e-9);
    double mid = evaluate(meas, RandomLoss((z1 + z2) / 2, sp));
    double avg = (evaluate(meas, RandomLoss(z1, sp)) + evaluate(meas, RandomLoss(z2, sp))) / 2;
    CHECK(mid <= avg + 1e-9);
  }
}

TEST_CASE("property: law invariance under permutations") {
  std::mt19937_64 rng(37);
  auto measures = sample_measures();
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 5;
    auto sp = OutcomeSpace::uniform(m);
    Eigen::VectorXd z = oracle::random_vector(rng, m);
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::VectorXd zp(m);
    for (int i = 0; i < m; ++i) zp[i] = z[perm[i]];
    RandomLoss a(z, sp), b(zp, sp);
    REQUIRE(equal_in_distribution(a, b, 1e-12));
    for (const auto& meas : measures)
      CHECK(evaluate(meas, a) == doctest::Approx(evaluate(meas, b)).epsilon(1e-9));
  }
}
