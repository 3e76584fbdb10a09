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

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "invrisk/backend.hpp"
#include "invrisk/dualpwl.hpp"
#include "invrisk/probspace.hpp"
#include "invrisk/riskmeasures.hpp"

namespace invrisk {

/// {x : A x <= b, E x = f}, or the unit simplex when `simplex` is set.
struct FeasibleSet {
  bool simplex = true;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd E;
  Eigen::VectorXd f;

  static FeasibleSet unit_simplex() { return FeasibleSet{}; }
};

/// min_x rho(W x) over a nonempty bounded polyhedron; row o of W is the
/// loss per unit of each decision in scenario o.
class ForwardProblem {
 public:
  ForwardProblem(Eigen::MatrixXd loss_matrix, std::vector<Rational> weights,
                 FeasibleSet feasible);
  // Long-only fully invested portfolio over scenario returns: W = -R.
  static ForwardProblem portfolio(const ScenarioMap& returns);

  int num_scenarios() const { return static_cast<int>(w_.rows()); }
  int num_decisions() const { return static_cast<int>(w_.cols()); }
  const Eigen::MatrixXd& loss_matrix() const { return w_; }
  const std::vector<Rational>& weights() const { return space_->weights(); }
  const SpacePtr& space() const { return space_; }
  const FeasibleSet& feasible() const { return feasible_; }

  std::vector<Var> add_decision(Program& p, const std::string& prefix) const;
  double infeasibility(const Eigen::VectorXd& x) const;
  LinearExpr loss_expr(const std::vector<Var>& x, int scenario) const;

 private:
  Eigen::MatrixXd w_;
  SpacePtr space_;
  FeasibleSet feasible_;
};

struct ForwardSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = true;
  double residual = 0.0;
  std::string note;
};

RandomLoss loss_of(const ForwardProblem& p, const Eigen::VectorXd& x);

struct OracleResult {
  double value = 0.0;
  Eigen::VectorXd x;
};
// h(y) = min_x y'W x over the feasible set.
OracleResult linear_oracle(const ForwardProblem& p, const Eigen::VectorXd& y);

// Adds constraints forcing lhs <= h(y) for the variable vector y.
void dualize_oracle_constraint(Program& prog, const ForwardProblem& p,
                               const std::vector<Var>& y, const LinearExpr& lhs,
                               const std::string& prefix);

ForwardSolution solve_forward(const ForwardProblem& p, const ReferenceMeasure& m);
ForwardSolution solve_forward(const ForwardProblem& p, const DualPwlRiskFunction& f);

// Entropic objective (1/s) ln sum_o g_o exp(s (W x)_o) and its gradient.
double entropic_objective(const ForwardProblem& p, double s, const Eigen::VectorXd& x,
                          Eigen::VectorXd* gradient = nullptr);
ForwardSolution solve_forward_entropic(const ForwardProblem& p, double s,
                                       double tol = 1e-10);

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

}  // namespace invrisk
