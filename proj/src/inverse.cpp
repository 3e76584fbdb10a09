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

#include "invrisk/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace invrisk {

const char* family_name(Family f) {
  switch (f) {
    case Family::Cvx: return "cvx";
    case Family::CvxMeasure: return "cvx_measure";
    case Family::LawInvCvx: return "lawinv_cvx";
    case Family::LawInvCvxMeasure: return "lawinv_cvx_measure";
  }
  return "unknown";
}

Family parse_family(const std::string& s) {
  if (s == "cvx") return Family::Cvx;
  if (s == "cvx_measure") return Family::CvxMeasure;
  if (s == "lawinv_cvx") return Family::LawInvCvx;
  if (s == "lawinv_cvx_measure") return Family::LawInvCvxMeasure;
  fail(ErrorCode::ParseError, "unknown family '" + s +
                                  "' (cvx, cvx_measure, lawinv_cvx, lawinv_cvx_measure)");
}

void InverseInstance::validate() const {
  if (observations.empty() && preferences.empty())
    fail(ErrorCode::InvalidArgument, "instance needs an observation or a preference pair");
  invrisk::validate(reference);
  if (!reference.has_subgradient_set())
    fail(ErrorCode::UnsupportedMeasure, "reference " + reference.name() + " has no finite dual set");
  for (std::size_t d = 0; d < observations.size(); ++d) {
    double bad = observations[d].problem.infeasibility(observations[d].x);
    if (!(bad <= 1e-8))
      fail(ErrorCode::InvalidArgument, "observed decision " + std::to_string(d) +
                                           " is infeasible by " + std::to_string(bad));
  }
}

namespace {

DiscreteDistribution dist_of(const LossOrDistribution& s) {
  if (const auto* z = std::get_if<RandomLoss>(&s)) return distribution_of(*z);
  return std::get<DiscreteDistribution>(s);
}

std::int64_t lcm_of(std::int64_t a, std::int64_t b) {
  std::int64_t g = std::gcd(a, b);
  if (a / g > std::numeric_limits<std::int64_t>::max() / b)
    fail(ErrorCode::CapExceeded, "common denominator overflows");
  return a / g * b;
}

class VertexBuilder {
 public:
  VertexBuilder(const InverseInstance& inst, VertexMode mode) : inst_(inst) {
    vs_.mode = mode;
    init_space();
  }

  VertexSet build() {
    for (const auto& ob : inst_.observations) {
      RandomLoss z = loss_of(ob.problem, ob.x);
      vs_.observation_vertex.push_back(add_observation(z));
    }
    vs_.zero_vertex = add_zero();
    std::vector<int> lower, upper;
    for (const auto& pr : inst_.preferences) lower.push_back(add_other(pr.lower));
    for (const auto& pr : inst_.preferences) upper.push_back(add_other(pr.upper));
    for (std::size_t k = 0; k < lower.size(); ++k)
      vs_.preference_vertices.emplace_back(lower[k], upper[k]);
    vs_.reference_values = Eigen::Map<Eigen::VectorXd>(
        ref_values_.data(), static_cast<Eigen::Index>(ref_values_.size()));
    return vs_;
  }

 private:
  void init_space() {
    if (vs_.mode == VertexMode::Reduced) return;
    if (!inst_.observations.empty()) {
      vs_.space = inst_.observations.front().problem.space();
    } else {
      for (const auto& pr : inst_.preferences)
        for (const auto* side : {&pr.lower, &pr.upper})
          if (const auto* z = std::get_if<RandomLoss>(side)) {
            if (!vs_.space) vs_.space = z->space();
          }
    }
    if (!vs_.space) {
      if (vs_.mode == VertexMode::General)
        fail(ErrorCode::InvalidArgument, "general families need loss vectors, not distributions");
      std::int64_t m = 1;
      for (const auto& pr : inst_.preferences) {
        m = lcm_of(m, dist_of(pr.lower).common_denominator());
        m = lcm_of(m, dist_of(pr.upper).common_denominator());
      }
      if (m > inst_.options.lift_cap)
        fail(ErrorCode::CapExceeded, "uniform lift needs " + std::to_string(m) + " outcomes");
      vs_.space = OutcomeSpace::uniform(static_cast<int>(m));
    }
    if (vs_.mode == VertexMode::Lifted && !vs_.space->is_uniform())
      fail(ErrorCode::InvalidArgument,
           "law-invariant lifted solve needs a uniform outcome space; lift the instance first");
  }

  int find(const DiscreteDistribution& d, const Eigen::VectorXd* v) const {
    for (int j = 0; j < static_cast<int>(ref_values_.size()); ++j) {
      if (vs_.mode == VertexMode::General) {
        if (vs_.vectors[j] == *v) return j;
      } else if (vs_.distributions[j] == d) {
        return j;
      }
    }
    return -1;
  }

  int push(Atoms atoms, const DiscreteDistribution& d, const Eigen::VectorXd* v) {
    if (v) vs_.vectors.push_back(*v);
    vs_.atoms.push_back(std::move(atoms));
    vs_.distributions.push_back(d);
    if (vs_.mode == VertexMode::General)
      ref_values_.push_back(evaluate(inst_.reference, RandomLoss(*v, vs_.space)));
    else
      ref_values_.push_back(evaluate(inst_.reference, d));
    return static_cast<int>(ref_values_.size()) - 1;
  }

  void check_space(const RandomLoss& z) const {
    if (!z.space()->same_as(*vs_.space))
      fail(ErrorCode::DimensionMismatch, "all losses must share one outcome space");
  }

  int add_observation(const RandomLoss& z) {
    DiscreteDistribution d = distribution_of(z);
    if (vs_.mode == VertexMode::Reduced)
      return push(Atoms{z.values(), z.space()->weights()}, d, nullptr);
    check_space(z);
    return push(Atoms{z.values(), vs_.space->weights()}, d, &z.values());
  }

  int add_zero() {
    DiscreteDistribution d = DiscreteDistribution::dirac(0.0);
    if (vs_.mode == VertexMode::Reduced) {
      int j = find(d, nullptr);
      return j >= 0 ? j : push(atoms_of(d), d, nullptr);
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(vs_.space->size());
    int j = find(d, &v);
    return j >= 0 ? j : push(Atoms{v, vs_.space->weights()}, d, &v);
  }

  int add_other(const LossOrDistribution& side) {
    DiscreteDistribution d = dist_of(side);
    if (vs_.mode == VertexMode::Reduced) {
      int j = find(d, nullptr);
      return j >= 0 ? j : push(atoms_of(d), d, nullptr);
    }
    Eigen::VectorXd v;
    const auto* z = std::get_if<RandomLoss>(&side);
    if (z && z->space()->same_as(*vs_.space)) {
      v = z->values();
    } else if (vs_.mode == VertexMode::General) {
      fail(ErrorCode::DimensionMismatch, "preference loss is not on the common outcome space");
    } else {
      v = replicate(d.support(), d, vs_.space->size());
    }
    int j = find(d, &v);
    return j >= 0 ? j : push(Atoms{v, vs_.space->weights()}, d, &v);
  }

  const InverseInstance& inst_;
  VertexSet vs_;
  std::vector<double> ref_values_;
};

struct InverseProgram {
  Program program;
  Var u;
  std::vector<Var> delta;
  std::vector<std::vector<Var>> y;
  std::vector<Var> pref_slack;
  std::vector<Var> obs_slack;
};

LinearExpr pairing(const std::vector<Var>& y, const Eigen::VectorXd& values) {
  LinearExpr e;
  for (Eigen::Index o = 0; o < values.size(); ++o) e.add(y[o], values[o]);
  return e;
}

InverseProgram build_program(const InverseInstance& inst, const VertexSet& vs, bool elastic) {
  InverseProgram ip;
  Program& p = ip.program;
  const int nv = vs.size();
  ip.u = p.add_var("u", 0.0, kInf);
  for (int j = 0; j < nv; ++j) {
    std::string name = "delta_" + std::to_string(j);
    ip.delta.push_back(j == vs.zero_vertex ? p.add_var(name, 0.0, 0.0) : p.add_var(name));
  }
  const bool measure = is_measure_family(inst.family);
  for (int j = 0; j < nv; ++j) {
    const Atoms& a = vs.atoms[j];
    std::string tag = std::to_string(j);
    ip.y.push_back(p.add_vars("y" + tag, static_cast<int>(a.values.size()), 0.0, kInf));
    embed_set(p, ip.y[j], subgradient_set(inst.reference, a.weights));
    if (measure) {
      LinearExpr e;
      for (const auto& v : ip.y[j]) e.add(v, 1.0);
      p.add_row(e, Sense::Equal, 1.0, "mass_" + tag);
    }
    p.add_row(LinearExpr(ip.delta[j]) - LinearExpr(ip.u), Sense::LessEqual,
              vs.reference_values[j], "band_hi_" + tag);
    p.add_row(LinearExpr(ip.delta[j]) + LinearExpr(ip.u), Sense::GreaterEqual,
              vs.reference_values[j], "band_lo_" + tag);
  }

  // Vertex consistency: y_j'X_i - delta_i <= y_j'X_j - delta_j.
  for (int j = 0; j < nv; ++j) {
    const Atoms& aj = vs.atoms[j];
    LinearExpr own = pairing(ip.y[j], aj.values);
    for (int i = 0; i < nv; ++i) {
      std::string tag = std::to_string(i) + "_" + std::to_string(j);
      if (vs.mode == VertexMode::General) {
        if (i == j) continue;
        LinearExpr e = pairing(ip.y[j], vs.atoms[i].values) - own;
        e.add(ip.delta[i], -1.0).add(ip.delta[j], 1.0);
        p.add_row(e, Sense::LessEqual, 0.0, "cons_" + tag);
        continue;
      }
      // Largest pairing over all orderings of X_i, through the dual of the
      // assignment polytope on the atoms of X_i and y_j.
      const Atoms& ai = vs.atoms[i];
      const int ni = static_cast<int>(ai.values.size());
      const int nj = static_cast<int>(aj.values.size());
      auto v = p.add_vars("v" + tag, ni);
      auto w = p.add_vars("w" + tag, nj);
      LinearExpr budget;
      for (const auto& x : v) budget.add(x, 1.0);
      for (const auto& x : w) budget.add(x, 1.0);
      budget.add(own, -1.0);
      budget.add(ip.delta[i], -1.0).add(ip.delta[j], 1.0);
      p.add_row(budget, Sense::LessEqual, 0.0, "cons_" + tag);
      for (int m = 0; m < ni; ++m) {
        for (int n = 0; n < nj; ++n) {
          LinearExpr e;
          e.add(ip.y[j][n], ai.values[m]);
          e.add(v[m], -to_double(aj.weights[n] / ai.weights[m]));
          e.add(w[n], -1.0);
          p.add_row(e, Sense::LessEqual, 0.0);
        }
      }
    }
  }

  for (std::size_t k = 0; k < vs.preference_vertices.size(); ++k) {
    auto [lo, up] = vs.preference_vertices[k];
    Var e;
    if (elastic) ip.pref_slack.push_back(e = p.add_var("pref_slack_" + std::to_string(k), 0.0, kInf));
    if (lo == up) continue;
    LinearExpr row = LinearExpr(ip.delta[lo]) - LinearExpr(ip.delta[up]);
    if (elastic) row.add(e, -1.0);
    p.add_row(row, Sense::LessEqual, 0.0, "pref_" + std::to_string(k));
  }

  for (std::size_t d = 0; d < inst.observations.size(); ++d) {
    int j = vs.observation_vertex[d];
    LinearExpr lhs = pairing(ip.y[j], vs.atoms[j].values);
    if (elastic) {
      Var e = p.add_var("obs_slack_" + std::to_string(d), 0.0, kInf);
      ip.obs_slack.push_back(e);
      lhs.add(e, -1.0);
    }
    dualize_oracle_constraint(p, inst.observations[d].problem, ip.y[j], lhs,
                              "obs" + std::to_string(d));
  }

  if (elastic) {
    LinearExpr obj;
    for (const auto& e : ip.pref_slack) obj.add(e, 1.0);
    for (const auto& e : ip.obs_slack) obj.add(e, 1.0);
    p.set_objective(obj, false);
  } else {
    p.set_objective(LinearExpr(ip.u), false);
  }
  return ip;
}

std::vector<std::string> active_rows(const Program& p, const std::vector<double>& x) {
  std::vector<std::string> out;
  for (const auto& row : p.rows()) {
    bool named = row.name.rfind("band_", 0) == 0 || row.name.rfind("pref_", 0) == 0 ||
                 row.name.rfind("obs", 0) == 0;
    if (!named || row.sense == Sense::Equal) continue;
    double a = 0.0;
    for (const auto& [id, c] : row.terms) a += c * x[id];
    if (std::abs(a - row.rhs) <= 1e-9) out.push_back(row.name);
  }
  return out;
}

ImputedResult run(const InverseInstance& inst, const VertexSet& vs) {
  InverseProgram ip = build_program(inst, vs, false);
  SolveReport r = solve(ip.program, inst.options.feas_tol);
  if (r.status == SolveStatus::Infeasible)
    fail(ErrorCode::Infeasible, "no risk function of family " + std::string(family_name(inst.family)) +
                                    " is consistent with the observations and preferences");
  if (r.status == SolveStatus::Unbounded) fail(ErrorCode::Unbounded, "inverse program unbounded");
  if (!r.optimal()) fail(ErrorCode::SolverFailure, "inverse program: " + r.message);
  const double u_star = r.objective;

  if (inst.options.tie_break) {
    Program second = ip.program;
    second.add_row(LinearExpr(ip.u), Sense::LessEqual, u_star + 1e-9, "u_cap");
    LinearExpr sum;
    for (const auto& d : ip.delta) sum.add(d, 1.0);
    second.set_objective(sum, false);
    SolveReport r2 = solve(second, inst.options.feas_tol);
    if (r2.optimal()) {
      r2.objective = u_star;
      r = r2;
    }
  }

  ImputedResult out;
  out.deviation = std::max(0.0, u_star);
  out.deltas = r.values(ip.delta);
  out.reference_values = vs.reference_values;
  out.observation_vertex = vs.observation_vertex;
  out.preference_vertices = vs.preference_vertices;
  out.active = active_rows(ip.program, r.primal);
  out.report = r;

  DualPwlRiskFunction& f = out.function;
  f.measure = inst.reference;
  f.deltas = out.deltas;
  f.translation_invariant = is_measure_family(inst.family);
  f.law_invariant = vs.mode != VertexMode::General;
  switch (vs.mode) {
    case VertexMode::General:
      f.kind = PwlKind::General;
      f.space = vs.space;
      f.vertices = vs.vectors;
      break;
    case VertexMode::Lifted:
      f.kind = PwlKind::LawInvariant;
      f.space = vs.space;
      f.vertices = vs.vectors;
      break;
    case VertexMode::Reduced:
      f.kind = PwlKind::Reduced;
      f.atoms = vs.distributions;
      break;
  }
  f.validate();
  return out;
}

void require_family(const InverseInstance& inst, bool law) {
  if (is_law_invariant_family(inst.family) != law)
    fail(ErrorCode::InvalidArgument, std::string("family ") + family_name(inst.family) +
                                         (law ? " is not law invariant" : " is law invariant"));
}

}  // namespace

VertexSet build_vertex_set(const InverseInstance& inst, VertexMode mode) {
  inst.validate();
  return VertexBuilder(inst, mode).build();
}

ImputedResult solve_general(const InverseInstance& inst) {
  require_family(inst, false);
  return run(inst, build_vertex_set(inst, VertexMode::General));
}

ImputedResult solve_law_invariant(const InverseInstance& inst) {
  require_family(inst, true);
  return run(inst, build_vertex_set(inst, VertexMode::Lifted));
}

ImputedResult solve_reduced(const InverseInstance& inst) {
  require_family(inst, true);
  return run(inst, build_vertex_set(inst, VertexMode::Reduced));
}

ImputedResult impute(const InverseInstance& inst) {
  return is_law_invariant_family(inst.family) ? solve_reduced(inst) : solve_general(inst);
}

std::int64_t common_lift_size(const InverseInstance& inst) {
  std::int64_t m = 1;
  for (const auto& ob : inst.observations)
    for (const auto& w : ob.problem.weights()) m = lcm_of(m, w.denominator());
  for (const auto& pr : inst.preferences) {
    m = lcm_of(m, dist_of(pr.lower).common_denominator());
    m = lcm_of(m, dist_of(pr.upper).common_denominator());
  }
  return m;
}

InverseInstance lift_instance(const InverseInstance& inst, std::int64_t size) {
  if (size > inst.options.lift_cap)
    fail(ErrorCode::CapExceeded, "uniform lift needs " + std::to_string(size) + " outcomes");
  InverseInstance out{{}, inst.reference, {}, inst.family, inst.options};
  const int m = static_cast<int>(size);
  auto space = OutcomeSpace::uniform(m);
  for (const auto& ob : inst.observations) {
    const auto& prob = ob.problem;
    Eigen::MatrixXd w(m, prob.num_decisions());
    Eigen::Index row = 0;
    for (int o = 0; o < prob.num_scenarios(); ++o) {
      Rational c = prob.weights()[o] * size;
      if (c.denominator() != 1)
        fail(ErrorCode::IncompatibleM, "scenario weight not a multiple of 1/" + std::to_string(size));
      for (std::int64_t r = 0; r < c.numerator(); ++r) w.row(row++) = prob.loss_matrix().row(o);
    }
    out.observations.push_back(
        Observation{ForwardProblem(w, space->weights(), prob.feasible()), ob.x});
  }
  auto lift = [&](const LossOrDistribution& side) -> LossOrDistribution {
    DiscreteDistribution d = dist_of(side);
    return RandomLoss(replicate(d.support(), d, size), space);
  };
  for (const auto& pr : inst.preferences)
    out.preferences.push_back(PreferencePair{lift(pr.lower), lift(pr.upper)});
  return out;
}

InfeasibilityReport diagnose_infeasibility(const InverseInstance& inst) {
  VertexMode mode = is_law_invariant_family(inst.family) ? VertexMode::Reduced : VertexMode::General;
  VertexSet vs = build_vertex_set(inst, mode);
  InverseProgram ip = build_program(inst, vs, true);
  SolveReport r = solve(ip.program, inst.options.feas_tol);
  if (!r.optimal()) fail(ErrorCode::SolverFailure, "elastic program: " + std::string(status_name(r.status)));
  InfeasibilityReport rep;
  const double flag = 1e-7;
  for (std::size_t k = 0; k < ip.pref_slack.size(); ++k) {
    double v = r.value(ip.pref_slack[k]);
    if (v > flag) rep.preferences.emplace_back(static_cast<int>(k), v);
  }
  for (std::size_t d = 0; d < ip.obs_slack.size(); ++d) {
    double v = r.value(ip.obs_slack[d]);
    if (v > flag) rep.observations.emplace_back(static_cast<int>(d), v);
  }
  rep.total_violation = r.objective > flag ? r.objective : 0.0;
  rep.feasible = rep.preferences.empty() && rep.observations.empty();
  return rep;
}

}  // namespace invrisk
