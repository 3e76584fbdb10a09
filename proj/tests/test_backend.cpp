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

#include "invrisk/backend.hpp"
#include "oracles.hpp"

using namespace invrisk;

TEST_CASE("bounded, unbounded and infeasible programs") {
  {
    Program p;
    Var x = p.add_var("x", 0.0);
    p.add_row(LinearExpr(x), Sense::LessEqual, 3.0);
    p.set_objective(x, true);
    auto r = solve(p);
    INFO(status_name(r.status), " ", r.message);
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-12));
  }
  {
    Program p;
    Var x = p.add_var("x", 0.0);
    p.set_objective(x, true);
    CHECK(solve(p).status == SolveStatus::Unbounded);
  }
  {
    Program p;
    Var x = p.add_var("x", 0.0);
    p.add_row(LinearExpr(x), Sense::LessEqual, -1.0);
    p.set_objective(LinearExpr(0.0), true);
    CHECK(solve(p).status == SolveStatus::Infeasible);
  }
}

TEST_CASE("rows reject undeclared variables") {
  Program p;
  p.add_var("x");
  CHECK_THROWS_AS(p.add_row(LinearExpr(Var{3}), Sense::Equal, 0.0), Error);
}

namespace {

// Optimal value of max c'y over y >= 0 in C.
double support(const SubgradientSet& c, const Eigen::VectorXd& v) {
  Program p;
  auto y = p.add_vars("y", static_cast<int>(v.size()), 0.0);
  embed_set(p, y, c);
  LinearExpr obj;
  for (int i = 0; i < v.size(); ++i) obj.add(y[i], v[i]);
  p.set_objective(obj, true);
  auto r = solve(p);
  REQUIRE(r.optimal());
  return r.objective;
}

}  // namespace

TEST_CASE("embed_set: simplex, singleton and CVaR box") {
  Eigen::Vector3d v(1, 3, 2);
  CHECK(support({FullSimplex{3}}, v) == doctest::Approx(3.0));
  CHECK(support({FullSimplex{3}}, -v) == doctest::Approx(-1.0));

  Eigen::Vector2d pt(0.25, 0.75);
  CHECK(support({Singleton{pt}}, Eigen::Vector2d(4, 8)) == doctest::Approx(7.0));
  CHECK(support({Singleton{pt}}, Eigen::Vector2d(-4, -8)) == doctest::Approx(-7.0));

  // CVaR(1/2) on two equal weights: 0 <= y_o <= 1 and 1'y = 1, i.e. the simplex.
  CVaRBox box{Rational(1, 2), {Rational(1, 2), Rational(1, 2)}};
  for (double a : {-2.0, 0.0, 1.5}) {
    Eigen::Vector2d c(a, 1.0);
    CHECK(support({box}, c) == doctest::Approx(std::max(a, 1.0)));
  }
}

TEST_CASE("second-order cone constraints") {
  Program p;
  Var x = p.add_var("x"), y = p.add_var("y"), t = p.add_var("t", 0.0);
  p.fix(t, 1.0);
  p.add_cone(t, {x, y});
  p.set_objective(LinearExpr(x) + LinearExpr(y), true);
  auto r = solve(p);
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
  CHECK(r.max_residual <= 1e-8);
}

TEST_CASE("emit_dual reproduces the inner optimum") {
  // min over x in the simplex of max over y in the simplex of y'(W x).
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(3, 2, [&] {
      return std::uniform_real_distribution<double>(-1, 1)(rng);
    });
    Program outer;
    auto x = outer.add_vars("x", 2, 0.0);
    outer.add_row(LinearExpr(x[0]) + LinearExpr(x[1]), Sense::Equal, 1.0);
    Program inner;
    auto y = inner.add_vars("y", 3, 0.0);
    embed_set(inner, y, {FullSimplex{3}});
    std::vector<LinearExpr> coef(3);
    for (int o = 0; o < 3; ++o) coef[o].add(x[0], w(o, 0)).add(x[1], w(o, 1));
    outer.set_objective(emit_dual(outer, inner, coef, "d"), false);
    auto r = solve(outer);
    REQUIRE(r.optimal());
    auto g = oracle::grid_simplex2(
        [&](double a) { return (w.col(0) * a + w.col(1) * (1 - a)).maxCoeff(); }, 1e-5);
    CHECK(r.objective == doctest::Approx(g.value).epsilon(1e-4));
  }
}

TEST_CASE("property: determinism and objective re-evaluation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Program p;
    auto x = p.add_vars("x", 4, 0.0, 1.0);
    for (int r = 0; r < 3; ++r) {
      LinearExpr e;
      for (auto v : x) e.add(v, u(rng));
      p.add_row(e, Sense::LessEqual, 0.5);
    }
    LinearExpr obj;
    for (auto v : x) obj.add(v, u(rng));
    p.set_objective(obj, true);
    auto a = solve(p), b = solve(p);
    REQUIRE(a.optimal());
    CHECK(a.primal == b.primal);
    CHECK(a.objective == b.objective);
    CHECK(std::abs(a.objective - obj.value(a.primal)) <= 1e-9);
    CHECK(a.max_residual <= 1e-8);
  }
}

TEST_CASE("LP text export") {
  Program p;
  Var x = p.add_var("x", 0.0, 2.0);
  p.add_row(LinearExpr(x), Sense::GreaterEqual, 1.0, "lo");
  p.set_objective(x, false);
  auto text = to_lp_text(p);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("lo:") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}
