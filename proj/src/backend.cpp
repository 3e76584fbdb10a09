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

#include "invrisk/backend.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "Highs.h"

namespace invrisk {

LinearExpr& LinearExpr::add(const LinearExpr& e, double scale) {
  for (const auto& [id, c] : e.terms_)
    if (c * scale != 0.0) terms_.emplace_back(id, c * scale);
  constant_ += scale * e.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator*=(double s) {
  for (auto& t : terms_) t.second *= s;
  constant_ *= s;
  return *this;
}

double LinearExpr::value(const std::vector<double>& x) const {
  double v = constant_;
  for (const auto& [id, c] : terms_) v += c * x.at(static_cast<std::size_t>(id));
  return v;
}

LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a.add(b, 1.0); }
LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a.add(b, -1.0); }
LinearExpr operator*(double s, LinearExpr e) { return e *= s; }

namespace {

std::vector<std::pair<int, double>> merge_terms(std::vector<std::pair<int, double>> t) {
  std::sort(t.begin(), t.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> out;
  for (const auto& [id, c] : t) {
    if (!out.empty() && out.back().first == id)
      out.back().second += c;
    else
      out.emplace_back(id, c);
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const auto& p) { return p.second == 0.0; }),
            out.end());
  return out;
}

}  // namespace

void Program::check(int id) const {
  if (id < 0 || id >= num_vars())
    fail(ErrorCode::InvalidArgument, "expression references an undeclared variable");
}

Var Program::add_var(const std::string& name, double lb, double ub) {
  if (std::isnan(lb) || std::isnan(ub) || lb > ub)
    fail(ErrorCode::InvalidArgument, "bad bounds for variable " + name);
  lb_.push_back(lb);
  ub_.push_back(ub);
  names_.push_back(name);
  return Var{num_vars() - 1};
}

std::vector<Var> Program::add_vars(const std::string& prefix, int n, double lb,
                                   double ub) {
  std::vector<Var> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out.push_back(add_var(prefix + "_" + std::to_string(i), lb, ub));
  return out;
}

void Program::add_row(const LinearExpr& expr, Sense sense, double rhs,
                      const std::string& name) {
  for (const auto& [id, c] : expr.terms()) {
    check(id);
    if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "non-finite coefficient");
  }
  double r = rhs - expr.constant();
  if (!std::isfinite(r)) fail(ErrorCode::InvalidArgument, "non-finite right-hand side");
  rows_.push_back(Row{merge_terms(expr.terms()), sense, r,
                      name.empty() ? "r" + std::to_string(rows_.size()) : name});
}

void Program::add_cone(Var t, const std::vector<Var>& u) {
  check(t.id);
  Cone c{t.id, {}};
  for (const auto& v : u) {
    check(v.id);
    c.u.push_back(v.id);
  }
  cones_.push_back(std::move(c));
}

void Program::set_objective(const LinearExpr& expr, bool maximize) {
  for (const auto& [id, c] : expr.terms()) {
    check(id);
    if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "non-finite objective");
  }
  objective_ = LinearExpr();
  for (const auto& [id, c] : merge_terms(expr.terms())) objective_.add(Var{id}, c);
  objective_.add_constant(expr.constant());
  maximize_ = maximize;
}

void Program::fix(Var v, double value) {
  check(v.id);
  lb_[static_cast<std::size_t>(v.id)] = value;
  ub_[static_cast<std::size_t>(v.id)] = value;
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::NumericalTrouble: return "NumericalTrouble";
  }
  return "Unknown";
}

Eigen::VectorXd SolveReport::values(const std::vector<Var>& vs) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = value(vs[i]);
  return out;
}

double max_violation(const Program& p, const std::vector<double>& x) {
  double worst = 0.0;
  for (int k = 0; k < p.num_vars(); ++k) {
    worst = std::max(worst, p.lower()[k] - x[k]);
    worst = std::max(worst, x[k] - p.upper()[k]);
  }
  for (const auto& row : p.rows()) {
    double a = 0.0;
    for (const auto& [id, c] : row.terms) a += c * x[id];
    switch (row.sense) {
      case Sense::LessEqual: worst = std::max(worst, a - row.rhs); break;
      case Sense::GreaterEqual: worst = std::max(worst, row.rhs - a); break;
      case Sense::Equal: worst = std::max(worst, std::abs(a - row.rhs)); break;
    }
  }
  for (const auto& cone : p.cones()) {
    double n2 = 0.0;
    for (int id : cone.u) n2 += x[id] * x[id];
    worst = std::max(worst, std::sqrt(n2) - x[cone.t]);
  }
  return worst;
}

namespace {

HighsLp to_highs(const Program& p) {
  HighsLp lp;
  lp.num_col_ = p.num_vars();
  lp.num_row_ = p.num_rows();
  lp.col_cost_.assign(static_cast<std::size_t>(p.num_vars()), 0.0);
  for (const auto& [id, c] : p.objective().terms()) lp.col_cost_[id] += c;
  lp.offset_ = p.objective().constant();
  lp.sense_ = p.maximize() ? ObjSense::kMaximize : ObjSense::kMinimize;
  lp.col_lower_ = p.lower();
  lp.col_upper_ = p.upper();
  lp.a_matrix_.format_ = MatrixFormat::kColwise;
  lp.a_matrix_.num_col_ = p.num_vars();
  lp.a_matrix_.num_row_ = p.num_rows();
  std::vector<HighsInt> count(static_cast<std::size_t>(p.num_vars()) + 1, 0);
  for (const auto& row : p.rows())
    for (const auto& term : row.terms) ++count[static_cast<std::size_t>(term.first) + 1];
  for (std::size_t k = 1; k < count.size(); ++k) count[k] += count[k - 1];
  lp.a_matrix_.start_ = count;
  lp.a_matrix_.index_.resize(static_cast<std::size_t>(count.back()));
  lp.a_matrix_.value_.resize(static_cast<std::size_t>(count.back()));
  HighsInt r = 0;
  for (const auto& row : p.rows()) {
    for (const auto& [id, c] : row.terms) {
      auto slot = static_cast<std::size_t>(count[static_cast<std::size_t>(id)]++);
      lp.a_matrix_.index_[slot] = r;
      lp.a_matrix_.value_[slot] = c;
    }
    double lo = -kHighsInf, up = kHighsInf;
    if (row.sense != Sense::GreaterEqual) up = row.rhs;
    if (row.sense != Sense::LessEqual) lo = row.rhs;
    lp.row_lower_.push_back(lo);
    lp.row_upper_.push_back(up);
    ++r;
  }
  return lp;
}

void configure(Highs& h) {
  h.setOptionValue("output_flag", false);
  h.setOptionValue("threads", 1);
  h.setOptionValue("random_seed", 0);
  h.setOptionValue("primal_feasibility_tolerance", 1e-10);
  h.setOptionValue("dual_feasibility_tolerance", 1e-10);
}

void add_cut(Highs& h, int t, const std::vector<int>& u, const std::vector<double>& g) {
  std::vector<HighsInt> idx;
  std::vector<double> val;
  idx.push_back(t);
  val.push_back(-1.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (g[i] == 0.0) continue;
    idx.push_back(u[i]);
    val.push_back(g[i]);
  }
  h.addRow(-kHighsInf, 0.0, static_cast<HighsInt>(idx.size()), idx.data(), val.data());
}

SolveStatus classify(Highs& h, HighsModelStatus ms) {
  switch (ms) {
    case HighsModelStatus::kOptimal: return SolveStatus::Optimal;
    case HighsModelStatus::kInfeasible: return SolveStatus::Infeasible;
    case HighsModelStatus::kUnbounded: return SolveStatus::Unbounded;
    case HighsModelStatus::kUnboundedOrInfeasible: {
      // Separate the two cases with a feasibility-only solve.
      Highs probe;
      configure(probe);
      HighsLp lp = h.getLp();
      std::fill(lp.col_cost_.begin(), lp.col_cost_.end(), 0.0);
      probe.passModel(lp);
      probe.run();
      return probe.getModelStatus() == HighsModelStatus::kOptimal
                 ? SolveStatus::Unbounded
                 : SolveStatus::Infeasible;
    }
    default: return SolveStatus::NumericalTrouble;
  }
}

}  // namespace

SolveReport solve(const Program& p, double feas_tol) {
  SolveReport report;
  Highs h;
  configure(h);
  if (h.passModel(to_highs(p)) == HighsStatus::kError) {
    report.message = "model rejected by solver";
    return report;
  }
  // Cones are handled by an outer approximation that starts from the box
  // |u_i| <= t and adds tangent cuts at violated points.
  for (const auto& cone : p.cones()) {
    for (int u : cone.u) {
      add_cut(h, cone.t, {u}, {1.0});
      add_cut(h, cone.t, {u}, {-1.0});
    }
  }
  const int max_rounds = 2000;
  for (int round = 0;; ++round) {
    h.run();
    report.status = classify(h, h.getModelStatus());
    if (report.status != SolveStatus::Optimal) {
      report.message = h.modelStatusToString(h.getModelStatus());
      return report;
    }
    report.primal = h.getSolution().col_value;
    report.cut_rounds = round;
    bool added = false;
    for (const auto& cone : p.cones()) {
      double n2 = 0.0;
      for (int id : cone.u) n2 += report.primal[id] * report.primal[id];
      double norm = std::sqrt(n2);
      if (norm - report.primal[cone.t] > 0.05 * feas_tol) {
        std::vector<double> g;
        for (int id : cone.u) g.push_back(report.primal[id] / norm);
        add_cut(h, cone.t, cone.u, g);
        added = true;
      }
    }
    if (!added) break;
    if (round + 1 >= max_rounds) {
      report.status = SolveStatus::NumericalTrouble;
      report.message = "cone approximation did not converge";
      return report;
    }
  }
  report.objective = p.objective().value(report.primal);
  report.max_residual = max_violation(p, report.primal);
  if (report.max_residual > feas_tol) {
    report.status = SolveStatus::NumericalTrouble;
    report.message = "residual " + std::to_string(report.max_residual) +
                     " exceeds tolerance";
  }
  return report;
}

namespace {

void write_expr(std::ostringstream& os, const std::vector<std::pair<int, double>>& terms,
                const Program& p) {
  if (terms.empty()) {
    os << " 0 " << p.names().at(0);
    return;
  }
  for (const auto& [id, c] : terms) {
    os << (c < 0 ? " - " : " + ") << std::abs(c) << " " << p.names()[id];
  }
}

}  // namespace

std::string to_lp_text(const Program& p) {
  std::ostringstream os;
  os.precision(17);
  os << (p.maximize() ? "Maximize\n" : "Minimize\n") << " obj:";
  write_expr(os, p.objective().terms(), p);
  if (p.objective().constant() != 0.0) os << " + " << p.objective().constant() << " constant";
  os << "\nSubject To\n";
  for (const auto& row : p.rows()) {
    os << " " << row.name << ":";
    write_expr(os, row.terms, p);
    os << (row.sense == Sense::LessEqual ? " <= "
           : row.sense == Sense::GreaterEqual ? " >= " : " = ")
       << row.rhs << "\n";
  }
  if (p.objective().constant() != 0.0) os << " fix_constant: constant = 1\n";
  for (std::size_t c = 0; c < p.cones().size(); ++c) {
    os << "\\ cone " << c << ": " << p.names()[p.cones()[c].t] << " >= ||(";
    for (std::size_t i = 0; i < p.cones()[c].u.size(); ++i)
      os << (i ? ", " : "") << p.names()[p.cones()[c].u[i]];
    os << ")||\n";
  }
  os << "Bounds\n";
  for (int k = 0; k < p.num_vars(); ++k) {
    double lo = p.lower()[k], up = p.upper()[k];
    const auto& n = p.names()[k];
    if (lo == up) {
      os << " " << n << " = " << lo << "\n";
    } else if (std::isinf(lo) && std::isinf(up)) {
      os << " " << n << " free\n";
    } else {
      os << " " << (std::isinf(lo) ? std::string("-inf") : std::to_string(lo)) << " <= "
         << n << " <= " << (std::isinf(up) ? std::string("+inf") : std::to_string(up))
         << "\n";
    }
  }
  os << "End\n";
  return os.str();
}

LinearExpr emit_dual(Program& outer, const Program& inner,
                     const std::vector<LinearExpr>& coefficients,
                     const std::string& prefix) {
  if (static_cast<int>(coefficients.size()) != inner.num_vars())
    fail(ErrorCode::DimensionMismatch, "one objective coefficient per inner variable");
  const int n = inner.num_vars();
  std::vector<std::vector<std::pair<Var, double>>> cols(static_cast<std::size_t>(n));
  LinearExpr dual_obj(inner.objective().constant());

  auto multiplier = [&](Sense s, const std::string& name) {
    switch (s) {
      case Sense::LessEqual: return outer.add_var(name, 0.0, kInf);
      case Sense::GreaterEqual: return outer.add_var(name, -kInf, 0.0);
      case Sense::Equal: break;
    }
    return outer.add_var(name);
  };

  int r = 0;
  for (const auto& row : inner.rows()) {
    if (row.terms.empty()) {
      ++r;
      continue;
    }
    Var lam = multiplier(row.sense, prefix + "_l" + std::to_string(r++));
    for (const auto& [id, c] : row.terms) cols[id].emplace_back(lam, c);
    dual_obj.add(lam, row.rhs);
  }
  for (int k = 0; k < n; ++k) {
    double lo = inner.lower()[k], up = inner.upper()[k];
    if (lo == up) {
      Var lam = multiplier(Sense::Equal, prefix + "_e" + std::to_string(k));
      cols[k].emplace_back(lam, 1.0);
      dual_obj.add(lam, lo);
      continue;
    }
    if (std::isfinite(lo)) {
      Var lam = multiplier(Sense::GreaterEqual, prefix + "_lb" + std::to_string(k));
      cols[k].emplace_back(lam, 1.0);
      dual_obj.add(lam, lo);
    }
    if (std::isfinite(up)) {
      Var lam = multiplier(Sense::LessEqual, prefix + "_ub" + std::to_string(k));
      cols[k].emplace_back(lam, 1.0);
      dual_obj.add(lam, up);
    }
  }

  // Stationarity: (A' lambda - c)_k = 0 off the cones, in the cone on them.
  std::vector<int> cone_slot(static_cast<std::size_t>(n), -1);
  std::vector<Var> slack(static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < inner.cones().size(); ++c) {
    const auto& cone = inner.cones()[c];
    std::vector<int> ids{cone.t};
    ids.insert(ids.end(), cone.u.begin(), cone.u.end());
    for (int id : ids) {
      if (cone_slot[id] >= 0)
        fail(ErrorCode::InvalidArgument, "variable shared by two cones");
      cone_slot[id] = static_cast<int>(c);
      slack[id] = outer.add_var(prefix + "_s" + std::to_string(id));
    }
    std::vector<Var> u;
    for (int id : cone.u) u.push_back(slack[id]);
    outer.add_cone(slack[cone.t], u);
  }
  for (int k = 0; k < n; ++k) {
    LinearExpr e;
    for (const auto& [lam, c] : cols[k]) e.add(lam, c);
    e.add(coefficients[k], -1.0);
    if (cone_slot[k] >= 0) e.add(slack[k], -1.0);
    outer.add_row(e, Sense::Equal, 0.0, prefix + "_st" + std::to_string(k));
  }
  return dual_obj;
}

}  // namespace invrisk
