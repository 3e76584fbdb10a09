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

#include "invrisk/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace invrisk {

ForwardProblem::ForwardProblem(Eigen::MatrixXd loss_matrix, std::vector<Rational> weights,
                               FeasibleSet feasible)
    : w_(std::move(loss_matrix)), feasible_(std::move(feasible)) {
  if (!w_.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite loss matrix");
  if (w_.rows() == 0 || w_.cols() == 0) fail(ErrorCode::InvalidArgument, "empty loss matrix");
  if (static_cast<std::size_t>(w_.rows()) != weights.size())
    fail(ErrorCode::DimensionMismatch, "one weight per scenario");
  space_ = std::make_shared<const OutcomeSpace>(std::move(weights));
  if (feasible_.simplex) return;
  const int n = num_decisions();
  auto& fs = feasible_;
  if (fs.A.rows() > 0 && (fs.A.cols() != n || fs.b.size() != fs.A.rows()))
    fail(ErrorCode::DimensionMismatch, "inequality block shape");
  if (fs.E.rows() > 0 && (fs.E.cols() != n || fs.f.size() != fs.E.rows()))
    fail(ErrorCode::DimensionMismatch, "equality block shape");
  if (fs.A.rows() == 0) {
    fs.A.resize(0, n);
    fs.b.resize(0);
  }
  if (fs.E.rows() == 0) {
    fs.E.resize(0, n);
    fs.f.resize(0);
  }
  // Nonempty: a feasibility solve.
  {
    Program p;
    add_decision(p, "x");
    p.set_objective(LinearExpr(), false);
    if (solve(p).status != SolveStatus::Optimal)
      fail(ErrorCode::Infeasible, "forward feasible set is empty");
  }
  // Bounded: the recession cone {d : A d <= 0, E d = 0} is trivial, i.e.
  // every coordinate of d is pinned to 0 on the cone intersected with a box.
  for (int i = 0; i < n; ++i) {
    for (bool up : {true, false}) {
      Program p;
      auto d = p.add_vars("d", n, -1.0, 1.0);
      for (Eigen::Index r = 0; r < fs.A.rows(); ++r) {
        LinearExpr e;
        for (int k = 0; k < n; ++k) e.add(d[k], fs.A(r, k));
        p.add_row(e, Sense::LessEqual, 0.0);
      }
      for (Eigen::Index r = 0; r < fs.E.rows(); ++r) {
        LinearExpr e;
        for (int k = 0; k < n; ++k) e.add(d[k], fs.E(r, k));
        p.add_row(e, Sense::Equal, 0.0);
      }
      p.set_objective(LinearExpr(d[i]), up);
      auto r = solve(p);
      if (!r.optimal()) fail(ErrorCode::SolverFailure, "boundedness check: " + r.message);
      if (std::abs(r.objective) > 1e-9)
        fail(ErrorCode::InvalidArgument, "forward feasible set is unbounded");
    }
  }
}

ForwardProblem ForwardProblem::portfolio(const ScenarioMap& returns) {
  return ForwardProblem(-returns.scenarios(), returns.probs(), FeasibleSet::unit_simplex());
}

std::vector<Var> ForwardProblem::add_decision(Program& p, const std::string& prefix) const {
  const int n = num_decisions();
  if (feasible_.simplex) {
    auto x = p.add_vars(prefix, n, 0.0, kInf);
    LinearExpr e;
    for (const auto& v : x) e.add(v, 1.0);
    p.add_row(e, Sense::Equal, 1.0, prefix + "_sum");
    return x;
  }
  auto x = p.add_vars(prefix, n);
  for (Eigen::Index r = 0; r < feasible_.A.rows(); ++r) {
    LinearExpr e;
    for (int i = 0; i < n; ++i) e.add(x[i], feasible_.A(r, i));
    p.add_row(e, Sense::LessEqual, feasible_.b[r]);
  }
  for (Eigen::Index r = 0; r < feasible_.E.rows(); ++r) {
    LinearExpr e;
    for (int i = 0; i < n; ++i) e.add(x[i], feasible_.E(r, i));
    p.add_row(e, Sense::Equal, feasible_.f[r]);
  }
  return x;
}

double ForwardProblem::infeasibility(const Eigen::VectorXd& x) const {
  if (x.size() != num_decisions()) fail(ErrorCode::DimensionMismatch, "decision length");
  if (feasible_.simplex)
    return std::max(std::abs(x.sum() - 1.0), std::max(0.0, -x.minCoeff()));
  double worst = 0.0;
  if (feasible_.A.rows() > 0)
    worst = std::max(worst, (feasible_.A * x - feasible_.b).maxCoeff());
  if (feasible_.E.rows() > 0)
    worst = std::max(worst, (feasible_.E * x - feasible_.f).cwiseAbs().maxCoeff());
  return worst;
}

LinearExpr ForwardProblem::loss_expr(const std::vector<Var>& x, int scenario) const {
  LinearExpr e;
  for (int i = 0; i < num_decisions(); ++i) e.add(x[i], w_(scenario, i));
  return e;
}

RandomLoss loss_of(const ForwardProblem& p, const Eigen::VectorXd& x) {
  if (x.size() != p.num_decisions()) fail(ErrorCode::DimensionMismatch, "decision length");
  return RandomLoss(p.loss_matrix() * x, p.space());
}

OracleResult linear_oracle(const ForwardProblem& p, const Eigen::VectorXd& y) {
  if (y.size() != p.num_scenarios()) fail(ErrorCode::DimensionMismatch, "dual vector length");
  if (!y.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite dual vector");
  Eigen::VectorXd c = p.loss_matrix().transpose() * y;
  OracleResult out;
  if (p.feasible().simplex) {
    Eigen::Index best = 0;
    c.minCoeff(&best);
    out.x = Eigen::VectorXd::Zero(p.num_decisions());
    out.x[best] = 1.0;
    out.value = c[best];
    return out;
  }
  Program prog;
  auto x = p.add_decision(prog, "x");
  LinearExpr obj;
  for (int i = 0; i < p.num_decisions(); ++i) obj.add(x[i], c[i]);
  prog.set_objective(obj, false);
  auto r = solve(prog);
  if (!r.optimal()) fail(ErrorCode::SolverFailure, "linear oracle: " + r.message);
  out.x = r.values(x);
  out.value = r.objective;
  return out;
}

void dualize_oracle_constraint(Program& prog, const ForwardProblem& p,
                               const std::vector<Var>& y, const LinearExpr& lhs,
                               const std::string& prefix) {
  const int n = p.num_decisions();
  const Eigen::MatrixXd& w = p.loss_matrix();
  auto wty = [&](int i) {
    LinearExpr e;
    for (int o = 0; o < p.num_scenarios(); ++o) e.add(y[o], w(o, i));
    return e;
  };
  if (p.feasible().simplex) {
    for (int i = 0; i < n; ++i)
      prog.add_row(lhs - wty(i), Sense::LessEqual, 0.0, prefix + "_vx" + std::to_string(i));
    return;
  }
  const auto& fs = p.feasible();
  auto mu = prog.add_vars(prefix + "_mu", static_cast<int>(fs.A.rows()), -kInf, 0.0);
  auto nu = prog.add_vars(prefix + "_nu", static_cast<int>(fs.E.rows()));
  for (int i = 0; i < n; ++i) {
    LinearExpr e;
    for (Eigen::Index r = 0; r < fs.A.rows(); ++r) e.add(mu[r], fs.A(r, i));
    for (Eigen::Index r = 0; r < fs.E.rows(); ++r) e.add(nu[r], fs.E(r, i));
    e.add(wty(i), -1.0);
    prog.add_row(e, Sense::Equal, 0.0, prefix + "_st" + std::to_string(i));
  }
  LinearExpr bound = lhs;
  for (Eigen::Index r = 0; r < fs.A.rows(); ++r) bound.add(mu[r], -fs.b[r]);
  for (Eigen::Index r = 0; r < fs.E.rows(); ++r) bound.add(nu[r], -fs.f[r]);
  prog.add_row(bound, Sense::LessEqual, 0.0, prefix + "_bound");
}

namespace {

ForwardSolution solve_min_max(const ForwardProblem& p, const Program& inner,
                              const std::vector<Var>& y, const Var* t) {
  Program outer;
  auto x = p.add_decision(outer, "x");
  std::vector<LinearExpr> coef(static_cast<std::size_t>(inner.num_vars()));
  for (int o = 0; o < p.num_scenarios(); ++o) coef[y[o].id] = p.loss_expr(x, o);
  if (t) coef[t->id] = LinearExpr(-1.0);
  LinearExpr obj = emit_dual(outer, inner, coef, "d");
  outer.set_objective(obj, false);
  auto r = solve(outer);
  if (r.status == SolveStatus::Infeasible)
    fail(ErrorCode::Infeasible, "forward problem: inner evaluation infeasible");
  if (r.status == SolveStatus::Unbounded)
    fail(ErrorCode::Unbounded, "forward problem unbounded");
  if (!r.optimal()) fail(ErrorCode::SolverFailure, "forward problem: " + r.message);
  ForwardSolution s;
  s.x = r.values(x);
  s.objective = r.objective;
  s.residual = r.max_residual;
  s.iterations = r.cut_rounds;
  return s;
}

}  // namespace

ForwardSolution solve_forward(const ForwardProblem& p, const ReferenceMeasure& m) {
  validate(m);
  if (std::holds_alternative<Entropic>(m.m)) {
    return solve_forward_entropic(p, std::get<Entropic>(m.m).s);
  }
  Program inner;
  auto y = inner.add_vars("y", p.num_scenarios(), 0.0, kInf);
  embed_set(inner, y, subgradient_set(m, p.weights()));
  return solve_min_max(p, inner, y, nullptr);
}

ForwardSolution solve_forward(const ForwardProblem& p, const DualPwlRiskFunction& f) {
  EvalProgram ep = f.kind == PwlKind::General ? build_general_eval(f)
                                              : build_law_eval(f, p.weights());
  if (f.kind == PwlKind::General && !f.space->same_as(*p.space()))
    fail(ErrorCode::DimensionMismatch, "function and problem live on different spaces");
  return solve_min_max(p, ep.program, ep.y, &ep.t);
}

double entropic_objective(const ForwardProblem& p, double s, const Eigen::VectorXd& x,
                          Eigen::VectorXd* gradient) {
  Eigen::VectorXd z = p.loss_matrix() * x;
  Eigen::VectorXd g = p.space()->weights_as_double();
  double top = z.maxCoeff();
  Eigen::ArrayXd e = g.array() * ((z.array() - top) * s).exp();
  double total = e.sum();
  if (gradient) *gradient = p.loss_matrix().transpose() * (e / total).matrix();
  return top + std::log(total) / s;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cum += u[k];
    double cand = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - cand > 0.0) theta = cand;
  }
  return (v.array() - theta).max(0.0).matrix();
}

namespace {

// Spectral projected gradient on the simplex with Armijo backtracking.
ForwardSolution spg(const ForwardProblem& p, double s, Eigen::VectorXd x, double tol) {
  const int max_iter = 200000;
  Eigen::VectorXd g;
  double fx = entropic_objective(p, s, x, &g);
  double step = 1.0;
  ForwardSolution out;
  out.converged = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    double pg = (project_to_simplex(x - g) - x).norm();
    if (pg <= tol) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd d = project_to_simplex(x - step * g) - x;
    double slope = g.dot(d);
    double lam = 1.0;
    Eigen::VectorXd xn, gn;
    double fn = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 80; ++bt) {
      xn = x + lam * d;
      fn = entropic_objective(p, s, xn, &gn);
      if (fn <= fx + 1e-4 * lam * slope) {
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    if (!accepted) {
      out.note = "line search stalled at projected-gradient norm " + std::to_string(pg);
      out.converged = pg <= 1e3 * tol;
      break;
    }
    Eigen::VectorXd sk = xn - x, yk = gn - g;
    double sy = sk.dot(yk);
    step = sy > 0.0 ? std::clamp(sk.squaredNorm() / sy, 1e-12, 1e12) : 1e12;
    x = xn;
    g = gn;
    fx = fn;
  }
  if (it >= max_iter) out.note = "MaxIterations";
  out.x = x;
  out.objective = fx;
  out.iterations = it;
  return out;
}

}  // namespace

ForwardSolution solve_forward_entropic(const ForwardProblem& p, double s, double tol) {
  if (!p.feasible().simplex)
    fail(ErrorCode::InvalidArgument, "entropic forward solver needs the simplex feasible set");
  if (!(s > 0.0)) fail(ErrorCode::ParameterOutOfRange, "entropic: s must be positive");
  const int n = p.num_decisions();
  std::vector<Eigen::VectorXd> starts;
  for (int i = 0; i < n; ++i) starts.push_back(Eigen::VectorXd::Unit(n, i));
  starts.push_back(Eigen::VectorXd::Constant(n, 1.0 / n));
  ForwardSolution best;
  bool have = false;
  int total_iter = 0;
  for (const auto& x0 : starts) {
    ForwardSolution cand = spg(p, s, x0, tol);
    total_iter += cand.iterations;
    if (!have || cand.objective < best.objective - 1e-15) {
      best = cand;
      have = true;
    }
  }
  best.iterations = total_iter;
  return best;
}

}  // namespace invrisk
