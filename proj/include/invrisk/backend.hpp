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

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "invrisk/subgradient_set.hpp"

namespace invrisk {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Var {
  int id = -1;
};

/// Sparse affine expression sum_k coef_k * var_k + constant.
class LinearExpr {
 public:
  LinearExpr() = default;
  LinearExpr(double c) : constant_(c) {}  // NOLINT
  LinearExpr(Var v) { terms_.emplace_back(v.id, 1.0); }  // NOLINT

  LinearExpr& add(Var v, double coef) {
    if (coef != 0.0) terms_.emplace_back(v.id, coef);
    return *this;
  }
  LinearExpr& add(const LinearExpr& e, double scale = 1.0);
  LinearExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  const std::vector<std::pair<int, double>>& terms() const { return terms_; }
  double constant() const { return constant_; }
  double value(const std::vector<double>& x) const;

  LinearExpr& operator+=(const LinearExpr& e) { return add(e, 1.0); }
  LinearExpr& operator-=(const LinearExpr& e) { return add(e, -1.0); }
  LinearExpr& operator*=(double s);

 private:
  std::vector<std::pair<int, double>> terms_;
  double constant_ = 0.0;
};

LinearExpr operator+(LinearExpr a, const LinearExpr& b);
LinearExpr operator-(LinearExpr a, const LinearExpr& b);
LinearExpr operator*(double s, LinearExpr e);

enum class Sense { LessEqual, GreaterEqual, Equal };

/// Linear program with optional second-order-cone memberships
/// ||u||_2 <= t. Variables and rows keep insertion order.
class Program {
 public:
  struct Row {
    std::vector<std::pair<int, double>> terms;  // merged, sorted by variable
    Sense sense;
    double rhs;
    std::string name;
  };
  struct Cone {
    int t;
    std::vector<int> u;
  };

  Var add_var(const std::string& name, double lb = -kInf, double ub = kInf);
  std::vector<Var> add_vars(const std::string& prefix, int n, double lb = -kInf,
                            double ub = kInf);
  // Adds expr (sense) rhs; the constant of expr moves to the right-hand side.
  void add_row(const LinearExpr& expr, Sense sense, double rhs,
               const std::string& name = "");
  void add_cone(Var t, const std::vector<Var>& u);
  void set_objective(const LinearExpr& expr, bool maximize);
  void fix(Var v, double value);

  int num_vars() const { return static_cast<int>(lb_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<double>& lower() const { return lb_; }
  const std::vector<double>& upper() const { return ub_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<Cone>& cones() const { return cones_; }
  const LinearExpr& objective() const { return objective_; }
  bool maximize() const { return maximize_; }

 private:
  void check(int id) const;

  std::vector<double> lb_, ub_;
  std::vector<std::string> names_;
  std::vector<Row> rows_;
  std::vector<Cone> cones_;
  LinearExpr objective_;
  bool maximize_ = false;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalTrouble };
const char* status_name(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::NumericalTrouble;
  double objective = 0.0;
  std::vector<double> primal;
  double max_residual = 0.0;
  int cut_rounds = 0;
  std::string message;

  bool optimal() const { return status == SolveStatus::Optimal; }
  double value(Var v) const { return primal.at(static_cast<std::size_t>(v.id)); }
  Eigen::VectorXd values(const std::vector<Var>& vs) const;
};

SolveReport solve(const Program& p, double feas_tol = 1e-8);

// Largest violation of rows, bounds and cones at x.
double max_violation(const Program& p, const std::vector<double>& x);

// CPLEX LP text. Cone memberships are written as comment lines.
std::string to_lp_text(const Program& p);

// Adds the constraints of C on y; y is expected to carry lower bound 0.
void embed_set(Program& p, const std::vector<Var>& y, const SubgradientSet& c);

// Appends to `outer` the dual of the maximization `inner`, whose objective
// coefficient on inner variable k is coefficients[k] (affine in outer
// variables); the inner program's own objective is ignored except for its
// constant. Returns the dual objective, which upper-bounds the inner optimum
// for every feasible outer point and equals it at the dual optimum.
LinearExpr emit_dual(Program& outer, const Program& inner,
                     const std::vector<LinearExpr>& coefficients,
                     const std::string& prefix);

}  // namespace invrisk
