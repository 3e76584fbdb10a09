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

#pragma once

// Random instances shared by the unit tests and the acceptance checks.

#include <random>
#include <variant>

#include "invrisk/inverse.hpp"
#include "oracles.hpp"

namespace gen {

using namespace invrisk;

inline DualPwlRiskFunction law_with_measure(int m, ReferenceMeasure meas,
                                            std::vector<Eigen::VectorXd> vertices,
                                            std::vector<double> deltas) {
  DualPwlRiskFunction f;
  f.kind = PwlKind::LawInvariant;
  f.space = OutcomeSpace::uniform(m);
  f.measure = std::move(meas);
  f.law_invariant = true;
  f.vertices = std::move(vertices);
  f.deltas = Eigen::Map<Eigen::VectorXd>(deltas.data(), static_cast<Eigen::Index>(deltas.size()));
  return f;
}

// Random law-invariant function: zero vertex plus `k` random vertices with
// values at or above the measure, so that it is normalized.
inline DualPwlRiskFunction random_law_function(std::mt19937_64& rng, int m, int k,
                                               const ReferenceMeasure& meas, bool translation) {
  std::uniform_real_distribution<double> noise(0.0, 0.3);
  std::vector<Eigen::VectorXd> xs{Eigen::VectorXd::Zero(m)};
  std::vector<double> ds{0.0};
  auto sp = OutcomeSpace::uniform(m);
  for (int j = 0; j < k; ++j) {
    xs.push_back(oracle::random_vector(rng, m));
    ds.push_back(evaluate(meas, RandomLoss(xs.back(), sp)) + noise(rng));
  }
  auto f = law_with_measure(m, meas, xs, ds);
  f.translation_invariant = translation;
  return f;
}

inline InverseInstance single(const ForwardProblem& p, const Eigen::VectorXd& x,
                              ReferenceMeasure ref, Family fam) {
  InverseInstance inst{{Observation{p, x}}, std::move(ref), {}, fam, {}};
  return inst;
}

inline ForwardProblem random_problem(std::mt19937_64& rng, int scenarios, int assets) {
  Eigen::MatrixXd w(scenarios, assets);
  for (int i = 0; i < scenarios; ++i) w.row(i) = oracle::random_vector(rng, assets);
  return ForwardProblem(w, OutcomeSpace::uniform(scenarios)->weights(), FeasibleSet::unit_simplex());
}

// A measure whose dual set lies inside that of `ref`, so that its optimal
// decisions can be rendered optimal by functions near `ref`.
inline ReferenceMeasure inner_measure(const ReferenceMeasure& ref) {
  if (const auto* c = std::get_if<CVaR>(&ref.m)) return {CVaR{c->alpha / 2}};
  if (const auto* m = std::get_if<MeanAbsDev>(&ref.m)) return {MeanAbsDev{m->gamma / 2}};
  if (const auto* m = std::get_if<MeanUpperSemidev>(&ref.m)) return {MeanUpperSemidev{m->gamma / 2}};
  if (const auto* s = std::get_if<StepwiseSpectral>(&ref.m)) {
    if (s->levels.size() == 2 && s->levels[0] > 0.0) {
      double lambda = s->levels[0];
      return mix_to_spectral((1.0 + lambda) / 2, s->breakpoints[1]);
    }
  }
  if (std::holds_alternative<MaxLoss>(ref.m)) return {CVaR{Rational(1, 2)}};
  return {Expectation{}};
}

// Random instance on a uniform space of size m: one observation and `k`
// preference pairs.
inline InverseInstance random_instance(std::mt19937_64& rng, int m, int k,
                                       ReferenceMeasure ref, Family fam) {
  auto p = random_problem(rng, m, 3);
  auto x = solve_forward(p, inner_measure(ref)).x;
  InverseInstance inst = single(p, x, std::move(ref), fam);
  for (int i = 0; i < k; ++i) {
    RandomLoss lo(oracle::random_vector(rng, m), p.space());
    RandomLoss up(oracle::random_vector(rng, m), p.space());
    inst.preferences.push_back({lo, up});
  }
  return inst;
}

}  // namespace gen
