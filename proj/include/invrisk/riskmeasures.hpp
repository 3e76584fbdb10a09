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
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "invrisk/probspace.hpp"
#include "invrisk/subgradient_set.hpp"

namespace invrisk {

struct MaxLoss {};
struct Expectation {};
/// E[Z] + gamma E|Z - E Z|, gamma in [0, 1/2].
struct MeanAbsDev {
  double gamma = 0;
};
/// E[Z] + gamma (E[(Z - E Z)_+^2])^(1/2), gamma in [0, 1].
struct MeanUpperSemidev {
  double gamma = 0;
  int order = 2;
};
struct CVaR {
  Rational alpha;
};
/// Spectrum equal to levels[k] on (breakpoints[k], breakpoints[k+1]].
struct StepwiseSpectral {
  Eigen::VectorXd levels;
  std::vector<Rational> breakpoints;
  bool zero_first_level = false;  // set only by cvar_as_spectral
};
/// (1/s) ln E[exp(s Z)].
struct Entropic {
  double s = 1.0;
};

struct ReferenceMeasure;
struct Mix {
  std::vector<double> weights;
  std::vector<ReferenceMeasure> parts;
};

struct ReferenceMeasure {
  using Variant = std::variant<MaxLoss, Expectation, MeanAbsDev, MeanUpperSemidev,
                               CVaR, StepwiseSpectral, Entropic, Mix>;
  Variant m;

  std::string name() const;
  // False when no polyhedral or cone description of the dual set exists.
  bool has_subgradient_set() const;
};

void validate(const ReferenceMeasure& m);

double evaluate(const ReferenceMeasure& m, const DiscreteDistribution& d);
double evaluate(const ReferenceMeasure& m, const RandomLoss& z);

// Dual set over atoms or outcomes carrying `weights`.
SubgradientSet subgradient_set(const ReferenceMeasure& m,
                               const std::vector<Rational>& weights);
SubgradientSet reduced_subgradient_set(const ReferenceMeasure& m,
                                       const DiscreteDistribution& d);
SubgradientSet lifted_subgradient_set(const ReferenceMeasure& m, int size);

ReferenceMeasure cvar_as_spectral(const Rational& alpha);
ReferenceMeasure mix_to_spectral(double lambda, const Rational& alpha);

// max q'values over q in C (intersected with the nonnegative orthant).
double support_function(const SubgradientSet& c, const Eigen::VectorXd& values);

// Closed forms used as cross-checks of the LP evaluations.
double spectral_closed_form(const StepwiseSpectral& m, const DiscreteDistribution& d);
double cvar_tail_closed_form(const Rational& alpha, const DiscreteDistribution& d);
// Weights on the ascending order statistics of a uniform space of the given
// size: phi_i = integral of the spectrum over ((i-1)/M, i/M].
Eigen::VectorXd discretized_spectrum(const StepwiseSpectral& m, int size);

}  // namespace invrisk
