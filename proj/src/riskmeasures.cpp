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

#include "invrisk/riskmeasures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "invrisk/backend.hpp"

namespace invrisk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_spectral(const StepwiseSpectral& m) {
  const auto k = m.levels.size();
  if (k == 0) fail(ErrorCode::ParameterOutOfRange, "spectral: no levels");
  if (static_cast<Eigen::Index>(m.breakpoints.size()) != k + 1)
    fail(ErrorCode::ParameterOutOfRange, "spectral: need one more breakpoint than levels");
  if (m.breakpoints.front() != 0 || m.breakpoints.back() != 1)
    fail(ErrorCode::ParameterOutOfRange, "spectral: breakpoints must run from 0 to 1");
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(m.breakpoints[i] < m.breakpoints[i + 1]))
      fail(ErrorCode::ParameterOutOfRange, "spectral: breakpoints not increasing");
    if (!std::isfinite(m.levels[i]))
      fail(ErrorCode::ParameterOutOfRange, "spectral: non-finite level");
    if (i > 0 && !(m.levels[i] > m.levels[i - 1]))
      fail(ErrorCode::ParameterOutOfRange, "spectral: levels not strictly increasing");
  }
  bool first_ok = m.zero_first_level ? m.levels[0] >= 0.0 : m.levels[0] > 0.0;
  if (!first_ok) fail(ErrorCode::ParameterOutOfRange, "spectral: levels must be positive");
  double total = 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    total += to_double(m.breakpoints[i + 1] - m.breakpoints[i]) * m.levels[i];
  if (std::abs(total - 1.0) > 1e-12)
    fail(ErrorCode::ParameterOutOfRange, "spectral: spectrum does not integrate to 1");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string ReferenceMeasure::name() const {
  return std::visit(
      overloaded{
          [](const MaxLoss&) { return std::string("max_loss"); },
          [](const Expectation&) { return std::string("expectation"); },
          [](const MeanAbsDev& x) { return "mad(" + fmt(x.gamma) + ")"; },
          [](const MeanUpperSemidev& x) { return "semidev(" + fmt(x.gamma) + ")"; },
          [](const CVaR& x) { return "cvar(" + rational_to_string(x.alpha) + ")"; },
          [](const StepwiseSpectral& x) {
            std::string s = "spectral(";
            for (Eigen::Index i = 0; i < x.levels.size(); ++i)
              s += (i ? "," : "") + fmt(x.levels[i]);
            return s + ")";
          },
          [](const Entropic& x) { return "entropic(" + fmt(x.s) + ")"; },
          [](const Mix& x) {
            std::string s = "mix(";
            for (std::size_t i = 0; i < x.parts.size(); ++i)
              s += (i ? "," : "") + fmt(x.weights[i]) + "*" + x.parts[i].name();
            return s + ")";
          },
      },
      m);
}

bool ReferenceMeasure::has_subgradient_set() const {
  return std::visit(overloaded{
                        [](const Entropic&) { return false; },
                        [](const Mix& x) {
                          for (const auto& p : x.parts)
                            if (!p.has_subgradient_set()) return false;
                          return true;
                        },
                        [](const auto&) { return true; },
                    },
                    m);
}

void validate(const ReferenceMeasure& m) {
  std::visit(
      overloaded{
          [](const MaxLoss&) {},
          [](const Expectation&) {},
          [](const MeanAbsDev& x) {
            if (!(x.gamma >= 0.0 && x.gamma <= 0.5))
              fail(ErrorCode::ParameterOutOfRange, "mad: gamma must lie in [0, 1/2]");
          },
          [](const MeanUpperSemidev& x) {
            if (!(x.gamma >= 0.0 && x.gamma <= 1.0))
              fail(ErrorCode::ParameterOutOfRange, "semidev: gamma must lie in [0, 1]");
            if (x.order != 2)
              fail(ErrorCode::ParameterOutOfRange, "semidev: only order 2 is supported");
          },
          [](const CVaR& x) {
            if (x.alpha < 0 || x.alpha >= 1)
              fail(ErrorCode::ParameterOutOfRange, "cvar: alpha must lie in [0, 1)");
          },
          [](const StepwiseSpectral& x) { check_spectral(x); },
          [](const Entropic& x) {
            if (!(x.s > 0.0) || !std::isfinite(x.s))
              fail(ErrorCode::ParameterOutOfRange, "entropic: s must be positive");
          },
          [](const Mix& x) {
            if (x.parts.empty() || x.parts.size() != x.weights.size())
              fail(ErrorCode::ParameterOutOfRange, "mix: weights and parts differ");
            double total = 0.0;
            for (double w : x.weights) {
              if (!(w >= 0.0)) fail(ErrorCode::ParameterOutOfRange, "mix: negative weight");
              total += w;
            }
            if (std::abs(total - 1.0) > 1e-12)
              fail(ErrorCode::ParameterOutOfRange, "mix: weights must sum to 1");
            for (const auto& p : x.parts) validate(p);
          },
      },
      m.m);
}

double support_function(const SubgradientSet& c, const Eigen::VectorXd& values) {
  Program p;
  auto q = p.add_vars("q", static_cast<int>(values.size()), 0.0, kInf);
  embed_set(p, q, c);
  LinearExpr obj;
  for (Eigen::Index o = 0; o < values.size(); ++o) obj.add(q[o], values[o]);
  p.set_objective(obj, true);
  auto r = solve(p);
  if (r.status == SolveStatus::Unbounded) fail(ErrorCode::Unbounded, "support function unbounded");
  if (r.status == SolveStatus::Infeasible) fail(ErrorCode::Infeasible, "empty subgradient set");
  if (!r.optimal()) fail(ErrorCode::SolverFailure, "support function: " + r.message);
  return r.objective;
}

double spectral_closed_form(const StepwiseSpectral& m, const DiscreteDistribution& d) {
  double value = 0.0;
  Rational lo(0);
  for (int o = 0; o < d.size(); ++o) {
    Rational hi = lo + d.probs()[o];
    double weight = 0.0;
    for (Eigen::Index k = 0; k < m.levels.size(); ++k) {
      Rational a = std::max(lo, m.breakpoints[k]);
      Rational b = std::min(hi, m.breakpoints[k + 1]);
      if (a < b) weight += to_double(b - a) * m.levels[k];
    }
    value += weight * d.support()[o];
    lo = hi;
  }
  return value;
}

double cvar_tail_closed_form(const Rational& alpha, const DiscreteDistribution& d) {
  Rational remaining(1);
  Rational cap_scale = Rational(1) / (Rational(1) - alpha);
  double value = 0.0;
  for (int o = d.size() - 1; o >= 0 && remaining > 0; --o) {
    Rational take = std::min(remaining, d.probs()[o] * cap_scale);
    value += to_double(take) * d.support()[o];
    remaining -= take;
  }
  return value;
}

Eigen::VectorXd discretized_spectrum(const StepwiseSpectral& m, int size) {
  Eigen::VectorXd phi(size);
  for (int i = 0; i < size; ++i) {
    Rational lo(i, size), hi(i + 1, size);
    double w = 0.0;
    for (Eigen::Index k = 0; k < m.levels.size(); ++k) {
      Rational a = std::max(lo, m.breakpoints[k]);
      Rational b = std::min(hi, m.breakpoints[k + 1]);
      if (a < b) w += to_double(b - a) * m.levels[k];
    }
    phi[i] = w;
  }
  return phi;
}

double evaluate(const ReferenceMeasure& m, const DiscreteDistribution& d) {
  validate(m);
  const Eigen::VectorXd& s = d.support();
  const Eigen::VectorXd p = d.probs_as_double();
  return std::visit(
      overloaded{
          [&](const MaxLoss&) { return s.maxCoeff(); },
          [&](const Expectation&) { return p.dot(s); },
          [&](const MeanAbsDev& x) {
            double mean = p.dot(s);
            return mean + x.gamma * p.dot((s.array() - mean).abs().matrix());
          },
          [&](const MeanUpperSemidev& x) {
            double mean = p.dot(s);
            Eigen::ArrayXd up = (s.array() - mean).max(0.0);
            return mean + x.gamma * std::sqrt(p.dot((up * up).matrix()));
          },
          [&](const CVaR&) { return support_function(reduced_subgradient_set(m, d), s); },
          [&](const StepwiseSpectral&) {
            return support_function(reduced_subgradient_set(m, d), s);
          },
          [&](const Entropic& x) {
            double top = s.maxCoeff();
            double acc = p.dot(((s.array() - top) * x.s).exp().matrix());
            return top + std::log(acc) / x.s;
          },
          [&](const Mix& x) {
            double v = 0.0;
            for (std::size_t c = 0; c < x.parts.size(); ++c)
              v += x.weights[c] * evaluate(x.parts[c], d);
            return v;
          },
      },
      m.m);
}

double evaluate(const ReferenceMeasure& m, const RandomLoss& z) {
  return evaluate(m, distribution_of(z));
}

SubgradientSet subgradient_set(const ReferenceMeasure& m,
                               const std::vector<Rational>& weights) {
  validate(m);
  const int n = static_cast<int>(weights.size());
  return std::visit(
      overloaded{
          [&](const MaxLoss&) { return SubgradientSet{FullSimplex{n}}; },
          [&](const Expectation&) {
            Eigen::VectorXd pt(n);
            for (int o = 0; o < n; ++o) pt[o] = to_double(weights[o]);
            return SubgradientSet{Singleton{pt}};
          },
          [&](const MeanAbsDev& x) { return SubgradientSet{MADSet{x.gamma, weights}}; },
          [&](const MeanUpperSemidev& x) {
            return SubgradientSet{SemidevSOC{x.gamma, weights}};
          },
          [&](const CVaR& x) { return SubgradientSet{CVaRBox{x.alpha, weights}}; },
          [&](const StepwiseSpectral& x) {
            std::vector<Rational> masses;
            for (std::size_t k = 0; k + 1 < x.breakpoints.size(); ++k)
              masses.push_back(x.breakpoints[k + 1] - x.breakpoints[k]);
            return SubgradientSet{TransportationPolytope{x.levels, masses, weights}};
          },
          [&](const Entropic&) -> SubgradientSet {
            fail(ErrorCode::UnsupportedMeasure, "entropic measure has no finite dual set");
          },
          [&](const Mix& x) {
            MinkowskiMix mix;
            mix.lambdas = x.weights;
            for (const auto& p : x.parts) mix.parts.push_back(subgradient_set(p, weights));
            return SubgradientSet{mix};
          },
      },
      m.m);
}

SubgradientSet reduced_subgradient_set(const ReferenceMeasure& m,
                                       const DiscreteDistribution& d) {
  return subgradient_set(m, d.probs());
}

namespace {

void check_lift(const ReferenceMeasure& m, int size) {
  std::visit(overloaded{
                 [&](const StepwiseSpectral& x) {
                   for (const auto& b : x.breakpoints)
                     if ((b * size).denominator() != 1)
                       fail(ErrorCode::IncompatibleM,
                            "breakpoint " + rational_to_string(b) +
                                " is not a multiple of 1/" + std::to_string(size));
                 },
                 [&](const Mix& x) {
                   for (const auto& p : x.parts) check_lift(p, size);
                 },
                 [](const auto&) {},
             },
             m.m);
}

}  // namespace

SubgradientSet lifted_subgradient_set(const ReferenceMeasure& m, int size) {
  if (size <= 0) fail(ErrorCode::IncompatibleM, "space size must be positive");
  check_lift(m, size);
  return subgradient_set(m, std::vector<Rational>(size, Rational(1, size)));
}

ReferenceMeasure cvar_as_spectral(const Rational& alpha) {
  if (alpha < 0 || alpha >= 1) fail(ErrorCode::ParameterOutOfRange, "cvar: alpha must lie in [0, 1)");
  StepwiseSpectral s;
  if (alpha == 0) {
    s.levels = Eigen::VectorXd::Ones(1);
    s.breakpoints = {Rational(0), Rational(1)};
    return ReferenceMeasure{s};
  }
  s.levels.resize(2);
  s.levels << 0.0, 1.0 / to_double(Rational(1) - alpha);
  s.breakpoints = {Rational(0), alpha, Rational(1)};
  s.zero_first_level = true;
  return ReferenceMeasure{s};
}

ReferenceMeasure mix_to_spectral(double lambda, const Rational& alpha) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    fail(ErrorCode::ParameterOutOfRange, "lambda must lie in [0, 1]");
  if (lambda == 0.0) return cvar_as_spectral(alpha);
  if (alpha < 0 || alpha >= 1) fail(ErrorCode::ParameterOutOfRange, "cvar: alpha must lie in [0, 1)");
  StepwiseSpectral s;
  if (lambda == 1.0 || alpha == 0) {
    s.levels = Eigen::VectorXd::Ones(1);
    s.breakpoints = {Rational(0), Rational(1)};
    return ReferenceMeasure{s};
  }
  s.levels.resize(2);
  s.levels << lambda, lambda + (1.0 - lambda) / to_double(Rational(1) - alpha);
  s.breakpoints = {Rational(0), alpha, Rational(1)};
  return ReferenceMeasure{s};
}

}  // namespace invrisk
