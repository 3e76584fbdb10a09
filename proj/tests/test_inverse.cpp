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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "invrisk/inverse.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace invrisk;
using gen::inner_measure;
using gen::random_instance;
using gen::random_problem;
using gen::single;

namespace {

const Family kFamilies[] = {Family::Cvx, Family::CvxMeasure, Family::LawInvCvx,
                            Family::LawInvCvxMeasure};

ForwardProblem two_asset() {
  Eigen::MatrixXd r(2, 2);
  r << 0.0325, 0.1370, -0.0755, -0.1712;
  return ForwardProblem::portfolio(ScenarioMap::uniform(r));
}

ReferenceMeasure rho_spec() { return mix_to_spectral(0.2, Rational(9, 10)); }

ImputedResult solve_for(const InverseInstance& inst, bool lifted_law = false) {
  if (!is_law_invariant_family(inst.family)) return solve_general(inst);
  return lifted_law ? solve_law_invariant(inst) : solve_reduced(inst);
}

Eigen::VectorXd vec2(double a, double b) { return Eigen::Vector2d(a, b); }

// Evaluates the imputed function at vertex j of the result.
double at_vertex(const ImputedResult& r, int j) {
  const auto& f = r.function;
  if (f.kind == PwlKind::Reduced) return evaluate(f, f.atoms[j]);
  return evaluate(f, RandomLoss(f.vertices[j], f.space));
}

double at(const ImputedResult& r, const LossOrDistribution& s) {
  if (const auto* z = std::get_if<RandomLoss>(&s)) return evaluate(r.function, *z);
  return evaluate(r.function, std::get<DiscreteDistribution>(s));
}

bool infeasible(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Infeasible) return true;
    throw;
  }
  return false;
}

// Law-invariant inverse program with every ordering of every vertex written
// out explicitly; uniform space, simplex feasible sets, loss-vector sides.
double enumerated_law_inverse(const InverseInstance& inst) {
  const auto& p = inst.observations.front().problem;
  const int m = p.num_scenarios();
  std::vector<Eigen::VectorXd> xs{loss_of(p, inst.observations.front().x).values(),
                                  Eigen::VectorXd::Zero(m)};
  std::vector<std::pair<int, int>> prefs;
  for (const auto& pr : inst.preferences) {
    int lo = static_cast<int>(xs.size());
    xs.push_back(std::get<RandomLoss>(pr.lower).values());
    xs.push_back(std::get<RandomLoss>(pr.upper).values());
    prefs.emplace_back(lo, lo + 1);
  }
  const int nv = static_cast<int>(xs.size());
  Program prog;
  Var u = prog.add_var("u", 0.0);
  std::vector<Var> delta;
  std::vector<std::vector<Var>> y;
  auto c = lifted_subgradient_set(inst.reference, m);
  for (int j = 0; j < nv; ++j) {
    delta.push_back(j == 1 ? prog.add_var("d", 0.0, 0.0) : prog.add_var("d"));
    y.push_back(prog.add_vars("y", m, 0.0));
    embed_set(prog, y[j], c);
    if (is_measure_family(inst.family)) {
      LinearExpr s;
      for (auto v : y[j]) s.add(v, 1.0);
      prog.add_row(s, Sense::Equal, 1.0);
    }
    double ref = evaluate(inst.reference, RandomLoss(xs[j], p.space()));
    prog.add_row(LinearExpr(delta[j]) - LinearExpr(u), Sense::LessEqual, ref);
    prog.add_row(LinearExpr(delta[j]) + LinearExpr(u), Sense::GreaterEqual, ref);
  }
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < nv; ++i) {
      std::vector<int> perm(m);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        LinearExpr e;
        for (int o = 0; o < m; ++o) e.add(y[j][o], xs[i][perm[o]] - xs[j][o]);
        e.add(delta[i], -1.0).add(delta[j], 1.0);
        prog.add_row(e, Sense::LessEqual, 0.0);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
  }
  for (auto [lo, up] : prefs) prog.add_row(LinearExpr(delta[lo]) - LinearExpr(delta[up]), Sense::LessEqual, 0.0);
  // y'X_d <= min over simplex vertices of y'W e_k.
  for (int k = 0; k < p.num_decisions(); ++k) {
    LinearExpr e;
    for (int o = 0; o < m; ++o) e.add(y[0][o], xs[0][o] - p.loss_matrix()(o, k));
    prog.add_row(e, Sense::LessEqual, 0.0);
  }
  prog.set_objective(LinearExpr(u), false);
  auto r = solve(prog);
  if (r.status == SolveStatus::Infeasible) return -1.0;
  REQUIRE(r.optimal());
  return r.objective;
}

}  // namespace

TEST_CASE("vertex sets") {
  auto p = two_asset();
  auto inst = single(p, vec2(1, 0), rho_spec(), Family::Cvx);
  auto vs = build_vertex_set(inst, VertexMode::General);
  REQUIRE(vs.size() == 2);
  CHECK(vs.vectors[0].isApprox(loss_of(p, vec2(1, 0)).values()));
  CHECK(vs.vectors[1].isZero());
  CHECK(vs.zero_vertex == 1);
  CHECK(vs.reference_values[0] == doctest::Approx(0.0647));

  inst.preferences.push_back({RandomLoss(vec2(0.1, 0.2), p.space()), RandomLoss(vec2(0.3, 0.1), p.space())});
  vs = build_vertex_set(inst, VertexMode::General);
  CHECK(vs.size() == 4);
  REQUIRE(vs.preference_vertices.size() == 1);
  CHECK(vs.preference_vertices[0] == std::pair<int, int>{2, 3});

  // A lower side equal in law to the observed loss merges with it.
  auto law = inst;
  law.family = Family::LawInvCvxMeasure;
  law.preferences[0].lower = RandomLoss(vec2(0.0755, -0.0325), p.space());
  for (auto mode : {VertexMode::Lifted, VertexMode::Reduced}) {
    auto lv = build_vertex_set(law, mode);
    CHECK(lv.size() == 3);
    CHECK(lv.preference_vertices[0] == std::pair<int, int>{0, 2});
  }
  // Two observations with the same loss stay separate.
  auto twice = inst;
  twice.observations.push_back(twice.observations[0]);
  CHECK(build_vertex_set(twice, VertexMode::General).observation_vertex == std::vector<int>{0, 1});
}

TEST_CASE("two-asset imputation") {
  auto p = two_asset();
  for (auto fam : kFamilies) {
    CAPTURE(family_name(fam));
    auto r = solve_for(single(p, vec2(1, 0), rho_spec(), fam));
    CHECK(r.deviation <= 1e-8);
    for (int j = 0; j < r.deltas.size(); ++j)
      CHECK(r.deltas[j] == doctest::Approx(r.reference_values[j]).epsilon(1e-8));
  }

  auto r = solve_general(single(p, vec2(0, 1), rho_spec(), Family::CvxMeasure));
  CHECK(r.deviation > 1e-4);
  double at_obs = evaluate(r.function, loss_of(p, vec2(0, 1)));
  auto fw = solve_forward(p, r.function);
  CHECK(fw.objective == doctest::Approx(at_obs).epsilon(1e-6));
  auto g = oracle::grid_simplex2(
      [&](double a) { return evaluate(r.function, loss_of(p, vec2(a, 1 - a))); }, 1e-3);
  CHECK(at_obs <= g.value + 1e-6);

  // The lifted and reduced formulations agree on this instance.
  auto law = single(p, vec2(0, 1), rho_spec(), Family::LawInvCvxMeasure);
  CHECK(solve_law_invariant(law).deviation == doctest::Approx(solve_reduced(law).deviation).epsilon(1e-6));
}

TEST_CASE("contradictory preferences") {
  auto sp = OutcomeSpace::uniform(2);
  RandomLoss up(vec2(0.1, 0.4), sp), lo(vec2(1.1, 1.4), sp);
  InverseInstance inst{{}, {CVaR{Rational(1, 2)}}, {{lo, up}}, Family::CvxMeasure, {}};
  CHECK(infeasible([&] { solve_general(inst); }));
  auto rep = diagnose_infeasibility(inst);
  CHECK_FALSE(rep.feasible);
  REQUIRE(rep.preferences.size() == 1);
  CHECK(rep.preferences[0].first == 0);
  CHECK(rep.preferences[0].second == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(rep.total_violation == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(rep.observations.empty());
}

TEST_CASE("dominated observation") {
  Eigen::MatrixXd w(2, 2);
  w << 0.1, 0.3, -0.2, 0.0;  // the second decision loses more in every outcome
  ForwardProblem p(w, OutcomeSpace::uniform(2)->weights(), FeasibleSet::unit_simplex());
  for (auto fam : kFamilies) {
    auto inst = single(p, vec2(0, 1), {Expectation{}}, fam);
    CHECK(infeasible([&] { impute(inst); }));
    auto rep = diagnose_infeasibility(inst);
    CHECK_FALSE(rep.feasible);
    REQUIRE(rep.observations.size() == 1);
    CHECK(rep.observations[0].first == 0);
    CHECK(rep.preferences.empty());
  }
  auto ok = diagnose_infeasibility(single(p, vec2(1, 0), {Expectation{}}, Family::Cvx));
  CHECK(ok.feasible);
  CHECK(ok.observations.empty());
  CHECK(ok.preferences.empty());
  CHECK(ok.total_violation == 0.0);
}

TEST_CASE("infeasible observed decisions are rejected") {
  auto p = two_asset();
  CHECK_THROWS_AS(solve_general(single(p, vec2(0.7, 0.7), rho_spec(), Family::Cvx)), Error);
}

TEST_CASE("expectation reference with an expected-loss minimizer") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = random_problem(rng, 5, 3);
    auto x = linear_oracle(p, p.space()->weights_as_double()).x;
    auto r = solve_reduced(single(p, x, {Expectation{}}, Family::LawInvCvxMeasure));
    CHECK(r.deviation <= 1e-8);
  }
}

TEST_CASE("constant losses: law-invariant equals general") {
  Eigen::MatrixXd w(3, 2);
  w << 0.3, 0.3, 0.3, 0.3, 0.3, 0.3;
  ForwardProblem p(w, OutcomeSpace::uniform(3)->weights(), FeasibleSet::unit_simplex());
  auto sp = p.space();
  InverseInstance inst = single(p, vec2(0.5, 0.5), {CVaR{Rational(1, 3)}}, Family::CvxMeasure);
  inst.preferences.push_back({RandomLoss(Eigen::Vector3d::Constant(0.1), sp),
                              RandomLoss(Eigen::Vector3d::Constant(0.4), sp)});
  auto g = solve_general(inst);
  inst.family = Family::LawInvCvxMeasure;
  CHECK(solve_law_invariant(inst).deviation == doctest::Approx(g.deviation).epsilon(1e-8));
  CHECK(solve_reduced(inst).deviation == doctest::Approx(g.deviation).epsilon(1e-8));
}

TEST_CASE("law-invariant program equals explicit ordering enumeration") {
  std::mt19937_64 rng(73);
  std::vector<ReferenceMeasure> refs{{MaxLoss{}}, {CVaR{Rational(1, 3)}}, {Expectation{}},
                                     mix_to_spectral(0.4, Rational(2, 3))};
  int feasible = 0;
  for (int trial = 0; trial < 24; ++trial) {
    Family fam = trial % 2 ? Family::LawInvCvx : Family::LawInvCvxMeasure;
    auto inst = random_instance(rng, 3, trial % 3, refs[trial % refs.size()], fam);
    double oracle_u = enumerated_law_inverse(inst);
    double lifted = -1.0, reduced = -1.0;
    if (!infeasible([&] { lifted = solve_law_invariant(inst).deviation; })) ++feasible;
    infeasible([&] { reduced = solve_reduced(inst).deviation; });
    CHECK(lifted == doctest::Approx(oracle_u).epsilon(1e-6));
    CHECK(reduced == doctest::Approx(oracle_u).epsilon(1e-6));
  }
  CHECK(feasible >= 12);
}

TEST_CASE("reduced path on a lift of twelve outcomes") {
  // Denominators 3 and 4 force twelve outcomes for the lifted program.
  Eigen::MatrixXd w(3, 2);
  w << 0.05, -0.02, -0.03, 0.06, 0.01, 0.00;
  ForwardProblem p(w, {Rational(1, 3), Rational(1, 3), Rational(1, 3)}, FeasibleSet::unit_simplex());
  auto ref = mix_to_spectral(0.2, Rational(3, 4));
  auto x = solve_forward(p, {Expectation{}}).x;
  InverseInstance inst = single(p, x, ref, Family::LawInvCvxMeasure);
  DiscreteDistribution lo({0.01, 0.04}, {Rational(3, 4), Rational(1, 4)});
  DiscreteDistribution up({-0.01, 0.06}, {Rational(1, 2), Rational(1, 2)});
  inst.preferences.push_back({lo, up});
  CHECK(common_lift_size(inst) == 12);
  auto lifted = lift_instance(inst, 12);
  auto a = solve_reduced(inst), b = solve_law_invariant(lifted);
  CHECK(a.deviation == doctest::Approx(b.deviation).epsilon(1e-6));
  CHECK(a.deviation > 0.0);
  CHECK_THROWS_AS(lift_instance(inst, 12 * 1000), Error);
}

TEST_CASE("property: imputed functions satisfy the defining constraints") {
  std::mt19937_64 rng(79);
  std::vector<ReferenceMeasure> refs{rho_spec(), {MaxLoss{}}, {CVaR{Rational(1, 2)}},
                                     {MeanAbsDev{0.25}}, {MeanUpperSemidev{0.5}}};
  int solved = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Family fam = kFamilies[trial % 4];
    const auto& ref = refs[(trial / 4) % refs.size()];
    CAPTURE(trial);
    CAPTURE(family_name(fam));
    CAPTURE(ref.name());
    auto inst = random_instance(rng, 4, 1 + trial % 2, ref, fam);
    ImputedResult r;
    if (infeasible([&] { r = impute(inst); })) continue;
    ++solved;
    // Deviation is the sup-norm distance at the vertices.
    double worst = (r.deltas - r.reference_values).cwiseAbs().maxCoeff();
    CHECK(std::abs(worst - r.deviation) <= 1e-8);
    for (int j = 0; j < r.deltas.size(); ++j)
      CHECK(at_vertex(r, j) == doctest::Approx(r.deltas[j]).epsilon(1e-6));
    for (const auto& pr : inst.preferences) CHECK(at(r, pr.lower) <= at(r, pr.upper) + 1e-6);
    const auto& ob = inst.observations[0];
    double obs = evaluate(r.function, loss_of(ob.problem, ob.x));
    for (int k = 0; k < 200; ++k) {
      auto x = oracle::random_simplex_point(rng, 3);
      CHECK(obs <= evaluate(r.function, loss_of(ob.problem, x)) + 1e-6);
    }
  }
  CHECK(solved >= 15);
}

TEST_CASE("property: zero deviation when the reference is consistent") {
  std::mt19937_64 rng(83);
  std::vector<ReferenceMeasure> refs{rho_spec(), {CVaR{Rational(1, 2)}}, {MaxLoss{}}};
  for (int trial = 0; trial < 12; ++trial) {
    const auto& ref = refs[trial % refs.size()];
    auto p = random_problem(rng, 4, 3);
    auto x = solve_forward(p, ref).x;
    // A preference the reference already satisfies.
    RandomLoss lo(oracle::random_vector(rng, 4), p.space());
    RandomLoss up(lo.values().array() + 0.1, p.space());
    for (auto fam : kFamilies) {
      auto inst = single(p, x, ref, fam);
      inst.preferences.push_back({lo, up});
      CHECK(solve_for(inst).deviation <= 1e-8);
      if (is_law_invariant_family(fam)) CHECK(solve_for(inst, true).deviation <= 1e-8);
    }
  }
}

TEST_CASE("property: adding preferences never lowers the deviation") {
  std::mt19937_64 rng(89);
  for (int chain = 0; chain < 50; ++chain) {
    Family fam = kFamilies[chain % 4];
    auto inst = random_instance(rng, 4, 0, {CVaR{Rational(1, 2)}}, fam);
    double last = impute(inst).deviation;
    for (int step = 0; step < 3; ++step) {
      auto sp = inst.observations[0].problem.space();
      RandomLoss a(oracle::random_vector(rng, 4, -0.5, 0.5), sp);
      RandomLoss b(oracle::random_vector(rng, 4, -0.5, 0.5), sp);
      inst.preferences.push_back({a, b});
      double next = -1.0;
      if (infeasible([&] { next = impute(inst).deviation; })) break;
      CHECK(next >= last - 1e-9);
      last = next;
    }
  }
}

TEST_CASE("tie-break makes the result deterministic") {
  std::mt19937_64 rng(97);
  auto inst = random_instance(rng, 4, 1, rho_spec(), Family::LawInvCvxMeasure);
  ImputedResult a, b;
  if (infeasible([&] { a = impute(inst); })) return;
  b = impute(inst);
  CHECK(a.deltas == b.deltas);
  CHECK(a.deviation == b.deviation);
}
