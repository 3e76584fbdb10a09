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

namespace invrisk {

// The sets below are described on a finite index set (outcomes, or the atoms
// of a distribution) carrying the weights `weights`. Each set is intersected
// with the nonnegative orthant wherever it is used.

/// {q : 1'q = 1}
struct FullSimplex {
  int dim = 0;
};

/// {point}
struct Singleton {
  Eigen::VectorXd point;
};

/// {q : q_o <= w_o / (1 - alpha), 1'q = 1}
struct CVaRBox {
  Rational alpha;
  std::vector<Rational> weights;
};

/// {q : q_o = w_o (1 + gamma (h_o - w'h)), |h_o| <= 1}
struct MADSet {
  double gamma = 0;
  std::vector<Rational> weights;
};

/// {q : q_o = w_o (1 + gamma (h_o - w'h)), h >= 0, sum_o w_o h_o^2 <= 1}
struct SemidevSOC {
  double gamma = 0;
  std::vector<Rational> weights;
};

/// {q = Q levels : Q >= 0, Q 1 = weights, Q' 1 = level_masses}
struct TransportationPolytope {
  Eigen::VectorXd levels;
  std::vector<Rational> level_masses;
  std::vector<Rational> weights;
};

/// {A q <= b, E q = f}
struct Polyhedron {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd E;
  Eigen::VectorXd f;
};

struct SubgradientSet;

/// {sum_c lambda_c q_c : q_c in part_c}
struct MinkowskiMix {
  std::vector<double> lambdas;
  std::vector<SubgradientSet> parts;
};

struct SubgradientSet {
  using Variant = std::variant<FullSimplex, Singleton, CVaRBox, MADSet,
                               SemidevSOC, TransportationPolytope, Polyhedron,
                               MinkowskiMix>;
  Variant set;

  int dim() const;
  std::string kind() const;
  // True when every member satisfies 1'q = 1.
  bool sums_to_one() const;
  bool needs_cone() const;
};

}  // namespace invrisk
