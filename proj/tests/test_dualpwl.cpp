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

#include "invrisk/dualpwl.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace invrisk;
using gen::law_with_measure;
using gen::random_law_function;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

DualPwlRiskFunction general_with_set(SpacePtr sp, SubgradientSet c,
                                     std::vector<Eigen::VectorXd> vertices,
                                     std::vector<double> deltas) {
  DualPwlRiskFunction f;
  f.kind = PwlKind::General;
  f.space = std::move(sp);
  f.set = std::move(c);
  f.vertices = std::move(vertices);
  f.deltas = Eigen::Map<Eigen::VectorXd>(deltas.data(), static_cast<Eigen::Index>(deltas.size()));
  return f;
}

ReferenceMeasure rho_spec() { return mix_to_spectral(0.2, Rational(9, 10)); }

std::vector<ReferenceMeasure> law_measures() {
  return {{MaxLoss{}}, {CVaR{Rational(1, 2)}}, {Expectation{}}, {MeanAbsDev{0.25}},
          mix_to_spectral(0.3, Rational(1, 2))};
}

}  // namespace

TEST_CASE("general evaluation examples") {
  auto s3 = OutcomeSpace::uniform(3);
  auto mx = general_with_set(s3, {FullSimplex{3}}, {Eigen::VectorXd::Zero(3)}, {0.0});
  CHECK(evaluate_general(mx, RandomLoss(vec({1, 3, 2}), s3)) == doctest::Approx(3.0));

  auto s2 = std::make_shared<const OutcomeSpace>(std::vector<Rational>{Rational(1, 4), Rational(3, 4)});
  auto ex = general_with_set(s2, {Singleton{vec({0.25, 0.75})}}, {Eigen::VectorXd::Zero(2)}, {0.0});
  CHECK(evaluate_general(ex, RandomLoss(vec({4, 8}), s2)) == doctest::Approx(7.0));

  auto u2 = OutcomeSpace::uniform(2);
  auto two = general_with_set(u2, {FullSimplex{2}}, {vec({0, 0}), vec({1, -1})}, {0.0, 0.0});
  CHECK(evaluate_general(two, RandomLoss(vec({1, -1}), u2)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("law-invariant evaluation examples") {
  auto f = law_with_measure(2, {MaxLoss{}}, {vec({0, 0})}, {0.0});
  auto u2 = OutcomeSpace::uniform(2);
  CHECK(evaluate_law_invariant(f, RandomLoss(vec({1, 3}), u2)) == doctest::Approx(3.0));
  auto g = law_with_measure(2, {MaxLoss{}}, {vec({0, 0}), vec({0, 4})}, {0.0, 1.0});
  CHECK(evaluate_law_invariant(g, RandomLoss(vec({0, 4}), u2)) == doctest::Approx(1.0));
  CHECK(evaluate_law_invariant(g, RandomLoss(vec({4, 0}), u2)) == doctest::Approx(1.0));
  CHECK(brute_force_law_eval(g, RandomLoss(vec({4, 0}), u2)) == doctest::Approx(1.0));
  CHECK(brute_force_law_eval(f, RandomLoss(vec({1, 3}), u2)) == doctest::Approx(3.0));
  auto big = law_with_measure(9, {MaxLoss{}}, {Eigen::VectorXd::Zero(9)}, {0.0});
  try {
    brute_force_law_eval(big, RandomLoss(Eigen::VectorXd::Zero(9), OutcomeSpace::uniform(9)));
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
}

TEST_CASE("reduced evaluation examples") {
  DiscreteDistribution d({1.0, 2.0}, {Rational(1, 3), Rational(2, 3)});
  CHECK(evaluate_reduced(from_measure({MaxLoss{}}, nullptr, PwlKind::Reduced), d) ==
        doctest::Approx(2.0));
  CHECK(evaluate_reduced(from_measure({Expectation{}}, nullptr, PwlKind::Reduced), d) ==
        doctest::Approx(5.0 / 3.0));
  DiscreteDistribution e({1.0, 3.0}, {Rational(1, 2), Rational(1, 2)});
  CHECK(evaluate_reduced(from_measure({CVaR{Rational(1, 2)}}, nullptr, PwlKind::Reduced), e) ==
        doctest::Approx(3.0));
  // Lifted counterpart of the first example.
  auto lifted = from_measure({MaxLoss{}}, OutcomeSpace::uniform(3), PwlKind::LawInvariant);
  CHECK(evaluate_law_invariant(lifted, uniform_lift(d, 100)) == doctest::Approx(2.0));
}

TEST_CASE("conjugate") {
  auto u2 = OutcomeSpace::uniform(2);
  auto mx = general_with_set(u2, {FullSimplex{2}}, {vec({0, 0})}, {0.0});
  CHECK(std::isinf(conjugate_at(mx, vec({-0.5, 1.5}))));
  CHECK(conjugate_at(mx, vec({1, 0})) == 0.0);
  CHECK(std::isinf(conjugate_at(mx, vec({0.5, 0.6}))));  // outside the simplex
  auto g = general_with_set(u2, {FullSimplex{2}}, {vec({0, 0}), vec({5, 0})}, {0.0, 2.0});
  CHECK(conjugate_at(g, vec({1, 0})) == doctest::Approx(3.0));
}

TEST_CASE("structural validation") {
  auto u2 = OutcomeSpace::uniform(2);
  auto bad = general_with_set(u2, {FullSimplex{2}}, {vec({0, 0})}, {0.5});
  CHECK_THROWS_AS(bad.validate(), Error);
  auto wrong = general_with_set(u2, {FullSimplex{3}}, {vec({0, 0})}, {0.0});
  CHECK_THROWS_AS(wrong.validate(), Error);
}

TEST_CASE("vertices carried at the values of a coherent reference reproduce it") {
  std::mt19937_64 rng(41);
  for (const auto& meas : law_measures()) {
    const int m = 4;
    auto sp = OutcomeSpace::uniform(m);
    std::vector<Eigen::VectorXd> xs{Eigen::VectorXd::Zero(m)};
    std::vector<double> ds{0.0};
    for (int j = 0; j < 3; ++j) {
      xs.push_back(oracle::random_vector(rng, m));
      ds.push_back(evaluate(meas, RandomLoss(xs.back(), sp)));
    }
    auto f = law_with_measure(m, meas, xs, ds);
    f.translation_invariant = true;
    auto g = f;
    g.kind = PwlKind::General;
    for (int j = 0; j < 4; ++j) {
      RandomLoss xj(xs[j], sp);
      CHECK(evaluate_law_invariant(f, xj) == doctest::Approx(ds[j]).epsilon(1e-6));
      CHECK(evaluate_general(g, xj) == doctest::Approx(ds[j]).epsilon(1e-6));
      CHECK(evaluate_reduced(f, distribution_of(xj)) == doctest::Approx(ds[j]).epsilon(1e-6));
    }
    for (int trial = 0; trial < 10; ++trial) {
      RandomLoss z(oracle::random_vector(rng, m), sp);
      CHECK(evaluate_law_invariant(f, z) == doctest::Approx(evaluate(meas, z)).epsilon(1e-7));
    }
  }
}

TEST_CASE("property: law-invariant evaluation equals permutation enumeration") {
  std::mt19937_64 rng(43);
  auto measures = law_measures();
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + trial % 3;
    const auto& meas = measures[trial % measures.size()];
    if (std::holds_alternative<StepwiseSpectral>(meas.m) && m % 2) continue;
    auto f = random_law_function(rng, m, 2, meas, trial % 2 == 0);
    RandomLoss z(oracle::random_vector(rng, m), f.space);
    CHECK(evaluate_law_invariant(f, z) == doctest::Approx(brute_force_law_eval(f, z)).epsilon(1e-6));
  }
}

TEST_CASE("property: reduced evaluation equals lifted evaluation") {
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> den(2, 4);
  std::uniform_real_distribution<double> u(-1, 1), noise(0, 0.3);
  auto random_dist = [&](int denom) {
    std::vector<double> v;
    std::vector<Rational> p;
    for (int k = 0; k < denom; ++k) {
      v.push_back(std::round(u(rng) * 4) / 4);
      p.push_back(Rational(1, denom));
    }
    return DiscreteDistribution(v, p);
  };
  std::vector<ReferenceMeasure> measures{{MaxLoss{}}, {CVaR{Rational(1, 2)}}, {Expectation{}}};
  for (int trial = 0; trial < 100; ++trial) {
    const auto& meas = measures[trial % measures.size()];
    std::vector<DiscreteDistribution> atoms{DiscreteDistribution::dirac(0.0)};
    std::vector<double> ds{0.0};
    for (int j = 0; j < 2; ++j) {
      auto a = random_dist(den(rng));
      while (a == DiscreteDistribution::dirac(0.0)) a = random_dist(den(rng));
      atoms.push_back(a);
      ds.push_back(evaluate(meas, atoms.back()) + noise(rng));
    }
    auto d = random_dist(den(rng));
    std::int64_t m = 1;
    for (const auto& a : atoms) m = std::lcm(m, a.common_denominator());
    m = std::lcm(m, d.common_denominator());
    REQUIRE(m <= 12);

    DualPwlRiskFunction red;
    red.kind = PwlKind::Reduced;
    red.measure = meas;
    red.law_invariant = true;
    red.translation_invariant = trial % 2 == 0;
    red.atoms = atoms;
    red.deltas = Eigen::Map<Eigen::VectorXd>(ds.data(), static_cast<Eigen::Index>(ds.size()));

    auto lifted = red;
    lifted.kind = PwlKind::LawInvariant;
    lifted.atoms.clear();
    lifted.space = OutcomeSpace::uniform(static_cast<int>(m));
    for (const auto& a : atoms) lifted.vertices.push_back(replicate(a.support(), a, m));
    RandomLoss z(replicate(d.support(), d, m), lifted.space);
    CHECK(evaluate_reduced(red, d) == doctest::Approx(evaluate_law_invariant(lifted, z)).epsilon(1e-6));
  }
}

TEST_CASE("property: normalization, monotonicity, convexity, translation") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> gap(0, 0.5), shift(-1, 1);
  auto measures = law_measures();
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 2 + trial % 3;
    const auto& meas = measures[trial % measures.size()];
    if (std::holds_alternative<StepwiseSpectral>(meas.m) && m % 2) continue;
    bool translation = trial % 2 == 0;
    auto f = random_law_function(rng, m, 2, meas, translation);
    auto g = f;
    g.kind = PwlKind::General;
    auto sp = f.space;
    CHECK(std::abs(evaluate_law_invariant(f, RandomLoss(Eigen::VectorXd::Zero(m), sp))) <= 1e-8);
    Eigen::VectorXd z1 = oracle::random_vector(rng, m), z2 = oracle::random_vector(rng, m);
    Eigen::VectorXd hi = z1;
    for (int i = 0; i < m; ++i) hi[i] += gap(rng);
    for (const auto* h : {&f, &g}) {
      auto ev = [&](const Eigen::VectorXd& z) { return evaluate(*h, RandomLoss(z, sp)); };
      CHECK(ev(hi) >= ev(z1) - 1e-8);
      CHECK(ev((z1 + z2) / 2) <= (ev(z1) + ev(z2)) / 2 + 1e-8);
      if (translation) {
        double c = shift(rng);
        CHECK(ev(z1.array() - c) == doctest::Approx(ev(z1) - c).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("a function without the translation flag need not be translation invariant") {
  auto u2 = OutcomeSpace::uniform(2);
  // Dual set {y >= 0, y_1 + y_2 <= 1} rather than the simplex.
  Eigen::MatrixXd a(1, 2);
  a << 1, 1;
  Polyhedron box{a, vec({1.0}), Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)};
  auto f = general_with_set(u2, {box}, {vec({0, 0})}, {0.0});
  double v = evaluate_general(f, RandomLoss(vec({-1, -2}), u2));
  CHECK(v == doctest::Approx(0.0));
  CHECK(evaluate_general(f, RandomLoss(vec({-2, -3}), u2)) != doctest::Approx(v - 1.0));
}
