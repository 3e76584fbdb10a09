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
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "invrisk/backend.hpp"
#include "invrisk/dualpwl.hpp"
#include "invrisk/forward.hpp"
#include "invrisk/riskmeasures.hpp"

namespace invrisk {

enum class Family { Cvx, CvxMeasure, LawInvCvx, LawInvCvxMeasure };
const char* family_name(Family f);
Family parse_family(const std::string& s);
inline bool is_measure_family(Family f) {
  return f == Family::CvxMeasure || f == Family::LawInvCvxMeasure;
}
inline bool is_law_invariant_family(Family f) {
  return f == Family::LawInvCvx || f == Family::LawInvCvxMeasure;
}

using LossOrDistribution = std::variant<RandomLoss, DiscreteDistribution>;

/// rho(lower) <= rho(upper) is required.
struct PreferencePair {
  LossOrDistribution lower;
  LossOrDistribution upper;
};

struct Observation {
  ForwardProblem problem;
  Eigen::VectorXd x;
};

struct InverseOptions {
  double feas_tol = 1e-8;
  bool tie_break = true;
  std::int64_t lift_cap = 5040;
};

struct InverseInstance {
  std::vector<Observation> observations;
  ReferenceMeasure reference;
  std::vector<PreferencePair> preferences;
  Family family = Family::LawInvCvxMeasure;
  InverseOptions options;

  void validate() const;
};

enum class VertexMode {
  General,  // loss vectors on one outcome space
  Lifted,   // loss vectors on a uniform space, one atom per outcome
  Reduced,  // distributions; observations keep one atom per scenario
};

struct VertexSet {
  VertexMode mode = VertexMode::General;
  SpacePtr space;                                  // General and Lifted
  std::vector<Eigen::VectorXd> vectors;            // General and Lifted
  std::vector<Atoms> atoms;                        // per vertex, as used in programs
  std::vector<DiscreteDistribution> distributions; // Lifted and Reduced
  Eigen::VectorXd reference_values;
  std::vector<int> observation_vertex;
  std::vector<std::pair<int, int>> preference_vertices;
  int zero_vertex = -1;

  int size() const { return static_cast<int>(reference_values.size()); }
};

VertexSet build_vertex_set(const InverseInstance& inst, VertexMode mode);

struct ImputedResult {
  DualPwlRiskFunction function;
  double deviation = 0.0;
  Eigen::VectorXd deltas;
  Eigen::VectorXd reference_values;
  std::vector<int> observation_vertex;
  std::vector<std::pair<int, int>> preference_vertices;
  // Rows that hold with equality at the solution, by name.
  std::vector<std::string> active;
  SolveReport report;
};

ImputedResult solve_general(const InverseInstance& inst);
ImputedResult solve_law_invariant(const InverseInstance& inst);
ImputedResult solve_reduced(const InverseInstance& inst);
// Picks the solver matching the family: general for Cvx and CvxMeasure,
// reduced for the law-invariant families.
ImputedResult impute(const InverseInstance& inst);

// Rewrites every scenario and distribution on the uniform space of the
// given size, replicating atoms.
InverseInstance lift_instance(const InverseInstance& inst, std::int64_t size);
// Smallest size on which every probability of the instance is a multiple.
std::int64_t common_lift_size(const InverseInstance& inst);

struct InfeasibilityReport {
  bool feasible = true;
  double total_violation = 0.0;
  std::vector<std::pair<int, double>> preferences;   // (pair index, violation)
  std::vector<std::pair<int, double>> observations;  // (observation index, violation)
};
InfeasibilityReport diagnose_infeasibility(const InverseInstance& inst);

}  // namespace invrisk
