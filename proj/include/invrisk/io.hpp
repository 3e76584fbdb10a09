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

#include <json.hpp>

#include "invrisk/dualpwl.hpp"
#include "invrisk/forward.hpp"
#include "invrisk/inverse.hpp"
#include "invrisk/riskmeasures.hpp"

namespace invrisk {

using json = nlohmann::json;

Rational rational_from_json(const json& j);
json rational_to_json(const Rational& r);

// [[value, "num/den"], ...]
DiscreteDistribution distribution_from_json(const json& j);
json distribution_to_json(const DiscreteDistribution& d);

// {"cvar": {"alpha": "9/10"}}, {"spectral_mix": {"lambda": 0.2, "alpha": "9/10"}},
// {"entropic": {"s": 1.0}}, "max_loss", ...
ReferenceMeasure measure_from_json(const json& j);
json measure_to_json(const ReferenceMeasure& m);

SubgradientSet set_from_json(const json& j);
json set_to_json(const SubgradientSet& c);

// {"loss_matrix": [[...]]} or {"returns": [[...]]} (loss = -returns),
// optional "weights", and "feasible": "simplex" | {"A", "b", "E", "f"}.
ForwardProblem problem_from_json(const json& j);
json problem_to_json(const ForwardProblem& p);

DualPwlRiskFunction function_from_json(const json& j);
json function_to_json(const DualPwlRiskFunction& f);

InverseInstance instance_from_json(const json& j);
json result_to_json(const ImputedResult& r);
json report_to_json(const InfeasibilityReport& r);

json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);
Eigen::MatrixXd matrix_from_json(const json& j);
json matrix_to_json(const Eigen::MatrixXd& m);

// Reads an outcome-by-asset returns table: header "date,asset1,..." and
// one row per day with simple returns.
Eigen::MatrixXd read_returns_csv(const std::string& path);

json read_json_file(const std::string& path);

}  // namespace invrisk
