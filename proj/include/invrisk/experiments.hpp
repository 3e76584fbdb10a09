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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "invrisk/forward.hpp"
#include "invrisk/inverse.hpp"
#include "invrisk/riskmeasures.hpp"

namespace invrisk {

enum class StudyMode { Illustrate, Simulate, Historical };

struct ExperimentConfig {
  StudyMode mode = StudyMode::Simulate;
  int assets = 5;
  int in_sample = 30;
  int out_sample = 30;
  int count = 100;
  std::vector<double> s_grid{0.01, 0.1, 1, 10, 50, 100};
  double lambda = 0.2;
  Rational alpha{9, 10};
  std::uint64_t seed = 20140101;
  std::string data_path;
  std::int64_t lift_cap = 5040;
  std::string out_dir = ".";
  int jobs = 1;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

// lambda E + (1 - lambda) CVaR_alpha, the client's stated preference.
ReferenceMeasure client_reference(const ExperimentConfig& c);

enum Portfolio { SpecPortfolio = 0, ImputedPortfolio = 1, EntropicPortfolio = 2 };
inline constexpr std::array<const char*, 3> kPortfolioNames{"x_Spec", "x_IC", "x_OCE"};

/// Risk values of one portfolio, as fractions (not percentage points).
struct Scores {
  double entropic_in = 0, spec_in = 0, entropic_out = 0, spec_out = 0;
};

struct SingleRun {
  double s = 0;
  std::array<Eigen::VectorXd, 3> x;  // indexed by Portfolio
  std::array<Scores, 3> scores;
  DualPwlRiskFunction imputed;
  double deviation = 0;         // u* of the imputation
  double vertex_deviation = 0;  // max_j |delta_j - reference(X_j)|
  double imputed_objective = 0;
};

struct WindowData {
  Eigen::MatrixXd in_sample;   // days x assets
  Eigen::MatrixXd out_sample;  // may be empty
};

// The three-step pipeline for one s on one window. x_spec may be passed in
// when already solved for the window.
SingleRun run_single(const WindowData& w, double s, const ReferenceMeasure& reference,
                     std::int64_t lift_cap, const Eigen::VectorXd* x_spec = nullptr);

// Higham's alternating projections with Dykstra's correction onto the unit
// diagonal and PSD sets.
Eigen::MatrixXd nearest_correlation(const Eigen::MatrixXd& a, int max_iter = 500,
                                    double tol = 1e-12);

struct SimulatedModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};
SimulatedModel simulate_model(std::uint64_t seed, int assets = 5);
Eigen::MatrixXd sample_returns(const SimulatedModel& m, std::uint64_t seed, int days);
// Model and days drawn from one seed.
Eigen::MatrixXd simulate_returns(std::uint64_t seed, int assets = 5, int days = 60);

// Seed of experiment `index` under the study seed.
std::uint64_t experiment_seed(std::uint64_t seed, std::uint64_t index);

struct ResultTable {
  std::string measure;  // "oce" or "spec"
  bool in_sample = true;
  std::vector<double> s_grid;
  // cells[portfolio][column], percentage points
  std::array<std::vector<double>, 3> cells;

  std::string to_csv() const;
};

struct StudyResult {
  std::vector<ResultTable> tables;  // in/oce, in/spec, out/oce, out/spec
  std::vector<int> included;        // per s column
  std::vector<int> failures;        // per s column
  std::vector<std::string> failure_log;
  // Fraction of included experiments where the per-experiment in-sample
  // entropic ordering x_OCE <= x_IC <= x_Spec holds within 1e-9.
  std::vector<double> ordering_fraction;
  std::vector<std::vector<SingleRun>> runs;  // [experiment][s column], failed cells empty

  const ResultTable& table(const std::string& measure, bool in_sample) const;
  nlohmann::json summary() const;
};

// Builds the windows of every experiment; historical mode needs the CSV.
std::vector<WindowData> study_windows(const ExperimentConfig& c);
StudyResult run_study(const ExperimentConfig& c);
// Writes the four table CSVs and summary.json into c.out_dir.
void write_study(const ExperimentConfig& c, const StudyResult& r);

struct IllustrationResult {
  std::vector<double> axis;             // 101 points over [-0.25, 0.25]
  std::vector<double> s_grid;
  // values[k][i * axis.size() + j] at (axis[i], axis[j]); k = 0 is the
  // reference, k = 1.. follow s_grid.
  std::vector<std::vector<double>> values;
  std::vector<SingleRun> runs;

  std::string to_csv() const;
  nlohmann::json summary() const;
};

// The two-asset, two-scenario returns of the worked illustration.
Eigen::MatrixXd illustration_returns();
IllustrationResult illustrate(const ExperimentConfig& c, int points = 101,
                              double half_width = 0.25);
void write_illustration(const ExperimentConfig& c, const IllustrationResult& r);

}  // namespace invrisk
