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

#include <random>
#include <set>

#include "invrisk/probspace.hpp"

using namespace invrisk;

namespace {

DiscreteDistribution dist(std::vector<double> v, std::vector<Rational> p) { return {v, p}; }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("rationals parse from fractions and decimals") {
  CHECK(parse_rational("9/10") == Rational(9, 10));
  CHECK(parse_rational("0.9") == Rational(9, 10));
  CHECK(parse_rational("3") == Rational(3));
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
}

TEST_CASE("outcome spaces validate weights") {
  CHECK(OutcomeSpace::uniform(3)->is_uniform());
  CHECK_FALSE(OutcomeSpace({Rational(1, 3), Rational(2, 3)}).is_uniform());
  CHECK_THROWS_AS(OutcomeSpace({Rational(1, 2), Rational(1, 3)}), Error);
  CHECK_THROWS_AS(OutcomeSpace({Rational(0), Rational(1)}), Error);
}

TEST_CASE("distributions sort and merge their support") {
  auto d = dist({2, 1, 2}, {Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  REQUIRE(d.size() == 2);
  CHECK(d.support()[0] == 1.0);
  CHECK(d.probs()[1] == Rational(2, 3));
  CHECK(d.common_denominator() == 3);
}

TEST_CASE("uniform_lift") {
  auto a = uniform_lift(dist({1, 2}, {Rational(1, 2), Rational(1, 2)}), 100);
  CHECK(a.size() == 2);
  CHECK(a.values() == vec({1, 2}));
  auto b = uniform_lift(DiscreteDistribution::dirac(5), 100);
  CHECK(b.values() == vec({5}));
  auto c = uniform_lift(dist({1, 2}, {Rational(1, 3), Rational(2, 3)}), 100);
  CHECK(c.values() == vec({1, 2, 2}));
  CHECK(c.space()->is_uniform());
  try {
    uniform_lift(dist({1, 2}, {Rational(1, 7), Rational(6, 7)}), 5);
    FAIL("expected CapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapExceeded);
  }
}

TEST_CASE("distribution_of") {
  auto d = distribution_of(RandomLoss(vec({1, 2, 2}), OutcomeSpace::uniform(3)));
  CHECK(d == dist({1, 2}, {Rational(1, 3), Rational(2, 3)}));
  auto e = distribution_of(RandomLoss(vec({3, 3, 3}), OutcomeSpace::uniform(3)));
  CHECK(e == DiscreteDistribution::dirac(3));
  auto f = distribution_of(RandomLoss(vec({0.0325, -0.0755}), OutcomeSpace::uniform(2)));
  CHECK(f.support()[0] == -0.0755);
  CHECK(f.support()[1] == 0.0325);
  CHECK(f.probs()[0] == Rational(1, 2));
}

TEST_CASE("replicate") {
  CHECK(replicate(vec({7, 9}), dist({0, 1}, {Rational(1, 3), Rational(2, 3)}), 3) == vec({7, 9, 9}));
  CHECK(replicate(vec({4}), DiscreteDistribution::dirac(0), 2) == vec({4, 4}));
  CHECK(replicate(vec({1, 2}), dist({0, 1}, {Rational(1, 2), Rational(1, 2)}), 2) == vec({1, 2}));
  try {
    replicate(vec({1, 2}), dist({0, 1}, {Rational(1, 3), Rational(2, 3)}), 2);
    FAIL("expected IncompatibleM");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompatibleM);
  }
}

TEST_CASE("sort_with_order") {
  auto r = sort_with_order(vec({3, 1, 2}));
  CHECK(r.sorted == vec({1, 2, 3}));
  CHECK(r.order == std::vector<int>{1, 2, 0});
  auto s = sort_with_order(vec({5, 5}));
  CHECK(s.order == std::vector<int>{0, 1});
  auto t = sort_with_order(vec({-0.0325, 0.0755}));
  CHECK(t.order == std::vector<int>{0, 1});
}

TEST_CASE("equal_in_distribution") {
  auto u2 = OutcomeSpace::uniform(2);
  CHECK(equal_in_distribution(RandomLoss(vec({1, 2}), u2), RandomLoss(vec({2, 1}), u2), 1e-12));
  CHECK_FALSE(equal_in_distribution(RandomLoss(vec({1, 2}), u2), RandomLoss(vec({1, 1}), u2), 1e-12));
  auto lifted = uniform_lift(dist({1, 2}, {Rational(1, 3), Rational(2, 3)}), 10);
  CHECK(equal_in_distribution(RandomLoss(vec({1, 2, 2}), OutcomeSpace::uniform(3)), lifted, 1e-12));
}

TEST_CASE("scenario maps merge repeated rows") {
  Eigen::MatrixXd rows(3, 2);
  rows << 1, 2, 3, 4, 1, 2;
  auto s = merge_duplicate_rows(rows);
  CHECK(s.size() == 2);
  CHECK(s.probs()[0] == Rational(2, 3));
  CHECK_THROWS_AS(ScenarioMap::uniform(rows), Error);
}

TEST_CASE("property: lift round trip, replication counts, permutations") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> atoms(1, 5), den(1, 4), num(1, 6);
  std::uniform_real_distribution<double> val(-3, 3);
  for (int trial = 0; trial < 300; ++trial) {
    int k = atoms(rng);
    std::vector<std::int64_t> counts(k);
    std::int64_t total = 0;
    for (auto& c : counts) total += (c = num(rng));
    std::vector<double> v(k);
    std::vector<Rational> p(k);
    for (int i = 0; i < k; ++i) {
      v[i] = std::round(val(rng) * 100) / 100 + i * 10;  // distinct
      p[i] = Rational(counts[i], total);
    }
    DiscreteDistribution d(v, p);
    auto z = uniform_lift(d, 100000);
    CHECK(distribution_of(z) == d);
    Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(d.size(), 0, d.size() - 1);
    auto rep = replicate(y, d, z.size());
    for (int o = 0; o < d.size(); ++o) {
      auto cnt = (rep.array() == static_cast<double>(o)).count();
      CHECK(Rational(cnt) == d.probs()[o] * z.size());
    }
    auto sr = sort_with_order(z);
    std::set<int> seen(sr.order.begin(), sr.order.end());
    CHECK(seen.size() == static_cast<std::size_t>(z.size()));
    for (int i = 0; i + 1 < z.size(); ++i) CHECK(sr.sorted[i] <= sr.sorted[i + 1]);
  }
  (void)den;
}

TEST_CASE("property: equal_in_distribution is an equivalence on a fixed space") {
  std::mt19937_64 rng(11);
  auto sp = OutcomeSpace::uniform(4);
  std::uniform_int_distribution<int> pick(0, 2);
  std::vector<RandomLoss> losses;
  for (int i = 0; i < 30; ++i) {
    Eigen::VectorXd v(4);
    for (int k = 0; k < 4; ++k) v[k] = pick(rng);
    losses.emplace_back(v, sp);
  }
  for (const auto& a : losses) {
    CHECK(equal_in_distribution(a, a, 1e-12));
    for (const auto& b : losses) {
      bool ab = equal_in_distribution(a, b, 1e-12);
      CHECK(ab == equal_in_distribution(b, a, 1e-12));
      if (!ab) continue;
      for (const auto& c : losses)
        if (equal_in_distribution(b, c, 1e-12)) CHECK(equal_in_distribution(a, c, 1e-12));
    }
  }
}
