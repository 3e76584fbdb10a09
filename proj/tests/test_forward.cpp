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

#include "invrisk/forward.hpp"
#include "oracles.hpp"

using namespace invrisk;

namespace {

ForwardProblem two_asset() {
  Eigen::MatrixXd r(2, 2);
  r << 0.0325, 0.1370, -0.0755, -0.1712;
  return ForwardProblem::portfolio(ScenarioMap::uniform(r));
}

ReferenceMeasure rho_spec() { return mix_to_spectral(0.2, Rational(9, 10)); }

// Random long-only problem with distinct scenario rows.
ForwardProblem random_portfolio(std::mt19937_64& rng, int scenarios, int assets) {
  Eigen::MatrixXd r(scenarios, assets);
  for (int i = 0; i < scenarios; ++i) r.row(i) = oracle::random_vector(rng, assets, -0.2, 0.2);
  return ForwardProblem::portfolio(ScenarioMap::uniform(r));
}

Eigen::VectorXd vec2(double a, double b) { return Eigen::Vector2d(a, b); }

}  // namespace

TEST_CASE("loss_of") {
  auto p = two_asset();
  auto l = loss_of(p, vec2(1, 0)).values();
  CHECK(l[0] == doctest::Approx(-0.0325));
  CHECK(l[1] == doctest::Approx(0.0755));
  CHECK(loss_of(p, vec2(0, 0)).values().isZero());
  auto k = loss_of(p, vec2(0, 1)).values();
  CHECK(k[0] == doctest::Approx(-0.1370));
  CHECK(k[1] == doctest::Approx(0.1712));
  try {
    loss_of(p, Eigen::Vector3d(1, 0, 0));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("linear oracle") {
  auto p = two_asset();
  auto a = linear_oracle(p, vec2(1, 0));
  CHECK(a.value == doctest::Approx(-0.1370));
  CHECK(a.x.isApprox(vec2(0, 1)));
  CHECK(linear_oracle(p, vec2(0, 0)).value == doctest::Approx(0.0));
  auto b = linear_oracle(p, vec2(0, 1));
  CHECK(b.value == doctest::Approx(0.0755));
  CHECK(b.x.isApprox(vec2(1, 0)));

  // The same simplex written as a general polyhedron.
  FeasibleSet poly;
  poly.simplex = false;
  poly.A = -Eigen::MatrixXd::Identity(2, 2);
  poly.b = Eigen::VectorXd::Zero(2);
  poly.E = Eigen::MatrixXd::Ones(1, 2);
  poly.f = Eigen::VectorXd::Ones(1);
  ForwardProblem q(p.loss_matrix(), p.weights(), poly);
  CHECK(linear_oracle(q, vec2(1, 0)).value == doctest::Approx(-0.1370));
  CHECK(linear_oracle(q, vec2(0, 1)).value == doctest::Approx(0.0755));
}

TEST_CASE("construction rejects empty or unbounded feasible sets") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(2, 2);
  std::vector<Rational> g{Rational(1, 2), Rational(1, 2)};
  FeasibleSet open;
  open.simplex = false;
  open.A = -Eigen::MatrixXd::Identity(2, 2);
  open.b = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(ForwardProblem(w, g, open), Error);
  FeasibleSet empty = open;
  empty.A.resize(3, 2);
  empty.A << -1, 0, 0, -1, 1, 1;
  empty.b = Eigen::Vector3d(-1, -1, 1);
  CHECK_THROWS_AS(ForwardProblem(w, g, empty), Error);
}

namespace {

// max of lhs subject to the dualized block with y fixed.
double dualized_bound(const ForwardProblem& p, const Eigen::VectorXd& yv) {
  Program prog;
  std::vector<Var> y;
  for (int o = 0; o < yv.size(); ++o) y.push_back(prog.add_var("y", yv[o], yv[o]));
  Var lhs = prog.add_var("lhs");
  dualize_oracle_constraint(prog, p, y, LinearExpr(lhs), "h");
  prog.set_objective(lhs, true);
  auto r = solve(prog);
  REQUIRE(r.optimal());
  return r.objective;
}

}  // namespace

TEST_CASE("dualized oracle constraint") {
  auto p = two_asset();
  CHECK(dualized_bound(p, vec2(1, 0)) == doctest::Approx(-0.1370));

  FeasibleSet box;
  box.simplex = false;
  box.A.resize(4, 2);
  box.A << 1, 0, 0, 1, -1, 0, 0, -1;
  box.b = Eigen::Vector4d(1, 1, 0, 0);
  ForwardProblem q(p.loss_matrix(), p.weights(), box);
  FeasibleSet twice = box;
  twice.b *= 2;
  ForwardProblem q2(p.loss_matrix(), p.weights(), twice);
  for (auto y : {vec2(1, 0), vec2(0, 1), vec2(0.3, 0.7)}) {
    double h = dualized_bound(q, y);
    CHECK(h == doctest::Approx(linear_oracle(q, y).value));
    CHECK(dualized_bound(q2, y) == doctest::Approx(2 * h));
  }
}

TEST_CASE("two-asset forward solutions") {
  auto p = two_asset();
  auto s = solve_forward(p, rho_spec());
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(s.x[1]) <= 1e-6);
  CHECK(s.objective == doctest::Approx(0.0647).epsilon(1e-9));
  auto m = solve_forward(p, {MaxLoss{}});
  CHECK(m.x.isApprox(vec2(1, 0), 1e-8));
  auto e = solve_forward(p, {Expectation{}});
  auto gbar = Eigen::Vector2d(0.5, 0.5);
  CHECK(e.objective == doctest::Approx(linear_oracle(p, gbar).value).epsilon(1e-9));
}

TEST_CASE("two-asset entropic solutions") {
  auto p = two_asset();
  auto grid_a = [&](double s) {
    return oracle::grid_simplex2(
               [&](double a) {
                 auto z = loss_of(p, vec2(a, 1 - a)).values();
                 std::vector<double> zs(z.data(), z.data() + 2);
                 return oracle::entropic_oce(s, zs, {0.5, 0.5});
               },
               1e-3)
        .a;
  };
  for (double s : {0.01, 0.1}) {
    auto r = solve_forward_entropic(p, s);
    CHECK(r.converged);
    CHECK(std::abs(r.x[0]) <= 1e-3);
    CHECK(grid_a(s) == 0.0);
  }
  // The grid oracle puts the minimizer at (1, 0) for every s >= 1, s = 100
  // included.
  for (double s : {1.0, 10.0, 50.0, 100.0}) {
    auto r = solve_forward_entropic(p, s);
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(grid_a(s) == 1.0);
  }
}

TEST_CASE("forward under a risk function with vertices") {
  auto p = two_asset();
  auto f = from_measure(rho_spec(), p.space(), PwlKind::General);
  auto s = solve_forward(p, f);
  CHECK(s.x.isApprox(vec2(1, 0), 1e-6));
  CHECK(s.objective == doctest::Approx(0.0647).epsilon(1e-8));
  auto g = from_measure(rho_spec(), p.space(), PwlKind::LawInvariant);
  CHECK(solve_forward(p, g).objective == doctest::Approx(0.0647).epsilon(1e-8));
}

TEST_CASE("property: entropic gradient matches central differences") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> ls(-2, 2);
  auto p = random_portfolio(rng, 6, 3);
  for (int trial = 0; trial < 100; ++trial) {
    double s = std::pow(10.0, ls(rng));
    Eigen::VectorXd x = oracle::random_simplex_point(rng, 3), g;
    entropic_objective(p, s, x, &g);
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Unit(3, i) * 1e-6;
      double fd = (entropic_objective(p, s, x + e) - entropic_objective(p, s, x - e)) / 2e-6;
      CHECK(std::abs(fd - g[i]) <= 1e-5 * std::max(1.0, std::abs(g[i])));
    }
  }
}

TEST_CASE("property: objective equals re-evaluation, CVaR matches its spectral form") {
  std::mt19937_64 rng(61);
  std::vector<ReferenceMeasure> measures{rho_spec(),          {MaxLoss{}},
                                         {MeanAbsDev{0.3}},   {MeanUpperSemidev{0.5}},
                                         {CVaR{Rational(3, 4)}}, {Expectation{}}};
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_portfolio(rng, 10, 3);
    Rational alpha(1 + trial % 9, 10);
    auto a = solve_forward(p, {CVaR{alpha}});
    auto b = solve_forward(p, cvar_as_spectral(alpha));
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-7));
    const auto& meas = measures[trial % measures.size()];
    auto s = solve_forward(p, meas);
    CHECK(p.infeasibility(s.x) <= 1e-8);
    CHECK(s.objective == doctest::Approx(evaluate(meas, loss_of(p, s.x))).epsilon(1e-7));
    if (trial % 10 == 0) {
      double es = 0.5 + trial / 10;
      auto r = solve_forward_entropic(p, es);
      CHECK(r.objective == doctest::Approx(evaluate({Entropic{es}}, loss_of(p, r.x))).epsilon(1e-7));
      for (int k = 0; k < 50; ++k) {
        auto x = oracle::random_simplex_point(rng, 3);
        CHECK(r.objective <= evaluate({Entropic{es}}, loss_of(p, x)) + 1e-9);
      }
    }
  }
}

TEST_CASE("property: the linear oracle is a true minimum") {
  std::mt19937_64 rng(67);
  auto p = random_portfolio(rng, 5, 4);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd y = oracle::random_vector(rng, 5, 0.0, 1.0);
    auto h = linear_oracle(p, y);
    CHECK(h.value == doctest::Approx(oracle::simplex_vertex_min(p.loss_matrix().transpose() * y)));
    auto x = oracle::random_simplex_point(rng, 4);
    CHECK(h.value <= y.dot(loss_of(p, x).values()) + 1e-12);
  }
}
