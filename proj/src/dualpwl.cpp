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

#include "invrisk/dualpwl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace invrisk {

int DualPwlRiskFunction::num_vertices() const {
  return kind == PwlKind::Reduced ? static_cast<int>(atoms.size())
                                  : static_cast<int>(vertices.size());
}

void DualPwlRiskFunction::validate() const {
  const int n = num_vertices();
  if (n < 1) fail(ErrorCode::InvalidArgument, "risk function needs at least one vertex");
  if (deltas.size() != n) fail(ErrorCode::DimensionMismatch, "one value per vertex");
  if (!deltas.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite vertex value");
  if (!set && !measure) fail(ErrorCode::InvalidArgument, "risk function without a dual set");
  if (measure && !measure->has_subgradient_set())
    fail(ErrorCode::UnsupportedMeasure, "measure has no finite dual set");
  if (kind == PwlKind::Reduced) {
    if (!measure) fail(ErrorCode::InvalidArgument, "distribution vertices need a measure");
    for (int j = 0; j < n; ++j)
      if (atoms[j].size() == 1 && atoms[j].support()[0] == 0.0 && deltas[j] != 0.0)
        fail(ErrorCode::InvalidArgument, "zero vertex must carry value 0");
    return;
  }
  if (!space) fail(ErrorCode::InvalidArgument, "loss vertices need an outcome space");
  if (kind == PwlKind::LawInvariant && !space->is_uniform())
    fail(ErrorCode::InvalidArgument, "law-invariant loss vertices need a uniform space");
  for (int j = 0; j < n; ++j) {
    if (vertices[j].size() != space->size())
      fail(ErrorCode::DimensionMismatch, "vertex length differs from space size");
    if (vertices[j].isZero(0.0) && deltas[j] != 0.0)
      fail(ErrorCode::InvalidArgument, "zero vertex must carry value 0");
  }
  if (set && set->dim() != space->size())
    fail(ErrorCode::DimensionMismatch, "dual set dimension differs from space size");
}

SubgradientSet DualPwlRiskFunction::set_for(const std::vector<Rational>& weights) const {
  if (measure) return subgradient_set(*measure, weights);
  if (!space || weights != space->weights())
    fail(ErrorCode::UnsupportedSet, "explicit dual set is tied to its own outcome space");
  return *set;
}

Atoms atoms_of(const DiscreteDistribution& d) {
  return Atoms{d.support(), d.probs()};
}

Atoms atoms_of(const RandomLoss& z) { return Atoms{z.values(), z.space()->weights()}; }

namespace {

Atoms vertex_atoms(const DualPwlRiskFunction& f, int j) {
  if (f.kind == PwlKind::Reduced) return atoms_of(f.atoms[j]);
  return Atoms{f.vertices[j], f.space->weights()};
}

void add_sum_to_one(Program& p, const std::vector<Var>& y) {
  LinearExpr e;
  for (const auto& v : y) e.add(v, 1.0);
  p.add_row(e, Sense::Equal, 1.0, "mass");
}

double solve_eval(EvalProgram& ep, const Eigen::VectorXd& arg) {
  LinearExpr obj;
  for (Eigen::Index o = 0; o < arg.size(); ++o) obj.add(ep.y[o], arg[o]);
  obj.add(ep.t, -1.0);
  ep.program.set_objective(obj, true);
  auto r = solve(ep.program);
  if (r.status == SolveStatus::Unbounded)
    fail(ErrorCode::Unbounded, "evaluation unbounded: dual set not bounded by the vertices");
  if (r.status == SolveStatus::Infeasible)
    fail(ErrorCode::Infeasible, "evaluation infeasible: empty dual set");
  if (!r.optimal()) fail(ErrorCode::SolverFailure, "evaluation: " + r.message);
  return r.objective;
}

}  // namespace

EvalProgram build_general_eval(const DualPwlRiskFunction& f) {
  f.validate();
  EvalProgram ep;
  const int m = f.space->size();
  ep.y = ep.program.add_vars("y", m, 0.0, kInf);
  ep.t = ep.program.add_var("t");
  embed_set(ep.program, ep.y, f.set_for(f.space->weights()));
  if (f.translation_invariant) add_sum_to_one(ep.program, ep.y);
  for (int j = 0; j < f.num_vertices(); ++j) {
    LinearExpr e;
    for (int o = 0; o < m; ++o) e.add(ep.y[o], f.vertices[j][o]);
    e.add(ep.t, -1.0);
    ep.program.add_row(e, Sense::LessEqual, f.deltas[j], "vertex" + std::to_string(j));
  }
  return ep;
}

EvalProgram build_law_eval(const DualPwlRiskFunction& f,
                           const std::vector<Rational>& arg_weights) {
  f.validate();
  EvalProgram ep;
  Program& p = ep.program;
  const int n0 = static_cast<int>(arg_weights.size());
  ep.y = p.add_vars("y", n0, 0.0, kInf);
  ep.t = p.add_var("t");
  embed_set(p, ep.y, f.set_for(arg_weights));
  if (f.translation_invariant) add_sum_to_one(p, ep.y);
  for (int i = 0; i < f.num_vertices(); ++i) {
    Atoms a = vertex_atoms(f, i);
    const int ni = static_cast<int>(a.values.size());
    std::string tag = std::to_string(i);
    auto v = p.add_vars("v" + tag, ni);
    auto w = p.add_vars("w" + tag, n0);
    LinearExpr budget;
    for (int m = 0; m < ni; ++m) budget.add(v[m], 1.0);
    for (int n = 0; n < n0; ++n) budget.add(w[n], 1.0);
    budget.add(ep.t, -1.0);
    p.add_row(budget, Sense::LessEqual, f.deltas[i], "budget" + tag);
    for (int m = 0; m < ni; ++m) {
      for (int n = 0; n < n0; ++n) {
        LinearExpr e;
        e.add(ep.y[n], a.values[m]);
        e.add(v[m], -to_double(arg_weights[n] / a.weights[m]));
        e.add(w[n], -1.0);
        p.add_row(e, Sense::LessEqual, 0.0);
      }
    }
  }
  return ep;
}

double evaluate_general(const DualPwlRiskFunction& f, const RandomLoss& z) {
  if (f.kind == PwlKind::Reduced) fail(ErrorCode::InvalidArgument, "general evaluation needs loss vertices");
  if (!f.space->same_as(*z.space()))
    fail(ErrorCode::DimensionMismatch, "loss and function live on different spaces");
  auto ep = build_general_eval(f);
  return solve_eval(ep, z.values());
}

double evaluate_law_invariant(const DualPwlRiskFunction& f, const RandomLoss& z) {
  if (!z.space()->is_uniform())
    fail(ErrorCode::InvalidArgument, "law-invariant evaluation needs a uniform space");
  if (f.kind == PwlKind::General)
    fail(ErrorCode::InvalidArgument, "function is not law invariant");
  auto ep = build_law_eval(f, z.space()->weights());
  return solve_eval(ep, z.values());
}

double evaluate_reduced(const DualPwlRiskFunction& f, const DiscreteDistribution& d) {
  if (f.kind == PwlKind::General)
    fail(ErrorCode::InvalidArgument, "function is not law invariant");
  auto ep = build_law_eval(f, d.probs());
  return solve_eval(ep, d.support());
}

double evaluate(const DualPwlRiskFunction& f, const RandomLoss& z) {
  switch (f.kind) {
    case PwlKind::General: return evaluate_general(f, z);
    case PwlKind::LawInvariant:
      if (z.space()->same_as(*f.space)) return evaluate_law_invariant(f, z);
      return evaluate_reduced(f, distribution_of(z));
    case PwlKind::Reduced: return evaluate_reduced(f, distribution_of(z));
  }
  return 0.0;
}

double evaluate(const DualPwlRiskFunction& f, const DiscreteDistribution& d) {
  if (f.kind == PwlKind::General) fail(ErrorCode::InvalidArgument, "function is not law invariant");
  return evaluate_reduced(f, d);
}

double conjugate_at(const DualPwlRiskFunction& f, const Eigen::VectorXd& y) {
  if (f.kind == PwlKind::Reduced)
    fail(ErrorCode::InvalidArgument, "conjugate needs loss vertices");
  f.validate();
  if (y.size() != f.space->size()) fail(ErrorCode::DimensionMismatch, "dual vector length");
  const double inf = std::numeric_limits<double>::infinity();
  if ((y.array() < 0.0).any() || !y.allFinite()) return inf;
  if (f.translation_invariant && std::abs(y.sum() - 1.0) > 1e-9) return inf;
  Program p;
  std::vector<Var> q;
  for (Eigen::Index o = 0; o < y.size(); ++o)
    q.push_back(p.add_var("q" + std::to_string(o), y[o], y[o]));
  embed_set(p, q, f.set_for(f.space->weights()));
  p.set_objective(LinearExpr(), false);
  auto r = solve(p);
  if (r.status != SolveStatus::Optimal) return inf;
  double best = -inf;
  for (int j = 0; j < f.num_vertices(); ++j) {
    double pair;
    if (f.kind == PwlKind::LawInvariant) {
      // The best ordering pairs sorted with sorted.
      Eigen::VectorXd a = sort_with_order(f.vertices[j]).sorted;
      Eigen::VectorXd b = sort_with_order(y).sorted;
      pair = a.dot(b);
    } else {
      pair = y.dot(f.vertices[j]);
    }
    best = std::max(best, pair - f.deltas[j]);
  }
  return best;
}

double brute_force_law_eval(const DualPwlRiskFunction& f, const RandomLoss& z) {
  if (f.kind != PwlKind::LawInvariant)
    fail(ErrorCode::InvalidArgument, "brute force needs law-invariant loss vertices");
  const int m = z.size();
  if (m > 8) fail(ErrorCode::TooLarge, "brute force limited to 8 outcomes");
  DualPwlRiskFunction g = f;
  g.kind = PwlKind::General;
  g.vertices.clear();
  std::vector<double> values;
  std::set<std::pair<std::vector<double>, double>> seen;
  for (int j = 0; j < f.num_vertices(); ++j) {
    std::vector<double> perm(f.vertices[j].data(), f.vertices[j].data() + m);
    std::sort(perm.begin(), perm.end());
    do {
      if (!seen.insert({perm, f.deltas[j]}).second) continue;
      g.vertices.push_back(Eigen::Map<Eigen::VectorXd>(perm.data(), m));
      values.push_back(f.deltas[j]);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  g.deltas = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  // Every permutation of a zero-valued zero vertex keeps value 0, so the
  // structural checks still hold.
  return evaluate_general(g, z);
}

DualPwlRiskFunction from_measure(const ReferenceMeasure& m, SpacePtr space, PwlKind kind) {
  DualPwlRiskFunction f;
  f.kind = kind;
  f.measure = m;
  f.translation_invariant = true;
  f.law_invariant = kind != PwlKind::General;
  f.deltas = Eigen::VectorXd::Zero(1);
  if (kind == PwlKind::Reduced) {
    f.atoms.push_back(DiscreteDistribution::dirac(0.0));
  } else {
    f.space = std::move(space);
    f.vertices.push_back(Eigen::VectorXd::Zero(f.space->size()));
  }
  return f;
}

}  // namespace invrisk
