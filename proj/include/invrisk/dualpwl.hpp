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

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "invrisk/backend.hpp"
#include "invrisk/probspace.hpp"
#include "invrisk/riskmeasures.hpp"

namespace invrisk {

enum class PwlKind {
  General,       // vertices are loss vectors on one outcome space
  LawInvariant,  // loss vectors on a uniform space, all orderings equivalent
  Reduced,       // vertices are distributions
};

/// Risk function rho(Z) = sup_{y >= 0, y in C} y'Z - max_j {y'X_j - delta_j}.
struct DualPwlRiskFunction {
  PwlKind kind = PwlKind::General;
  SpacePtr space;                             // General and LawInvariant
  std::vector<Eigen::VectorXd> vertices;      // General and LawInvariant
  std::vector<DiscreteDistribution> atoms;    // Reduced
  Eigen::VectorXd deltas;
  // Dual set on `space`; required unless `measure` is given.
  std::optional<SubgradientSet> set;
  // Measure whose dual sets C are instantiated on demand for any weights.
  std::optional<ReferenceMeasure> measure;
  bool translation_invariant = false;
  bool law_invariant = false;

  int num_vertices() const;
  // Checks the structural invariants; throws on violation.
  void validate() const;
  SubgradientSet set_for(const std::vector<Rational>& weights) const;
};

/// Atoms with weights; the building block of the law-invariant programs.
/// Values need not be distinct.
struct Atoms {
  Eigen::VectorXd values;
  std::vector<Rational> weights;
};
Atoms atoms_of(const DiscreteDistribution& d);
Atoms atoms_of(const RandomLoss& z);

/// Inner evaluation program without an objective; the objective of the
/// evaluation is sum_o arg_o * y_o - t.
struct EvalProgram {
  Program program;
  std::vector<Var> y;
  Var t;
};

// sup over y in C of y'Z - t with y'X_j - t <= delta_j.
EvalProgram build_general_eval(const DualPwlRiskFunction& f);
// Same with the permutation supremum over each vertex collapsed through
// the v/w dual of the assignment polytope, for an argument carried by
// `arg_weights`.
EvalProgram build_law_eval(const DualPwlRiskFunction& f,
                           const std::vector<Rational>& arg_weights);

double evaluate_general(const DualPwlRiskFunction& f, const RandomLoss& z);
double evaluate_law_invariant(const DualPwlRiskFunction& f, const RandomLoss& z);
double evaluate_reduced(const DualPwlRiskFunction& f, const DiscreteDistribution& d);
// Dispatches on the kind; law-invariant functions at losses on other spaces
// go through the distribution of the loss.
double evaluate(const DualPwlRiskFunction& f, const RandomLoss& z);
double evaluate(const DualPwlRiskFunction& f, const DiscreteDistribution& d);

// max_j {y'X_j - delta_j} on the dual set, +infinity outside.
double conjugate_at(const DualPwlRiskFunction& f, const Eigen::VectorXd& y);

// Enumerates all orderings of every vertex; limited to spaces of size <= 8.
double brute_force_law_eval(const DualPwlRiskFunction& f, const RandomLoss& z);

// Reference measure written as a function with the single zero vertex.
DualPwlRiskFunction from_measure(const ReferenceMeasure& m, SpacePtr space,
                                 PwlKind kind);

}  // namespace invrisk
