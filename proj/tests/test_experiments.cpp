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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "invrisk/errors.hpp"
#include "invrisk/experiments.hpp"
#include "oracles.hpp"

using namespace invrisk;

namespace {

WindowData illustration_window() { return {illustration_returns(), Eigen::MatrixXd()}; }

ReferenceMeasure rho_spec() { return mix_to_spectral(0.2, Rational(9, 10)); }

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.count = 3;
  c.s_grid = {0.1, 10};
  c.seed = 11;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("illustration pipeline at s = 1 keeps the reference") {
  auto r = run_single(illustration_window(), 1.0, rho_spec(), 5040);
  CHECK(r.x[EntropicPortfolio][0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[SpecPortfolio][0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.deviation <= 1e-8);
  CHECK(r.x[ImputedPortfolio][0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("illustration pipeline: imputed forward optimum is the observation") {
  auto w = illustration_window();
  auto p = ForwardProblem::portfolio(ScenarioMap::uniform(w.in_sample));
  for (double s : {0.01, 0.1, 1.0, 10.0, 50.0, 100.0}) {
    auto r = run_single(w, s, rho_spec(), 5040);
    double at_obs = evaluate(r.imputed, loss_of(p, r.x[EntropicPortfolio]));
    CHECK(r.imputed_objective == doctest::Approx(at_obs).epsilon(1e-6));
    auto g = oracle::grid_simplex2(
        [&](double a) { return evaluate(r.imputed, loss_of(p, Eigen::Vector2d(a, 1 - a))); }, 1e-2);
    CHECK(r.imputed_objective <= g.value + 1e-6);
    CHECK(std::abs(r.vertex_deviation - r.deviation) <= 1e-8);
  }
}

TEST_CASE("constant returns make every portfolio equivalent") {
  Eigen::MatrixXd r = Eigen::MatrixXd::Constant(30, 3, 0.01);
  WindowData w{r, r};
  auto run = run_single(w, 2.0, rho_spec(), 5040);
  for (int k = 1; k < 3; ++k) {
    CHECK(run.scores[k].entropic_in == doctest::Approx(run.scores[0].entropic_in).epsilon(1e-9));
    CHECK(run.scores[k].spec_in == doctest::Approx(run.scores[0].spec_in).epsilon(1e-9));
  }
  CHECK(run.scores[0].spec_in == doctest::Approx(-0.01).epsilon(1e-9));
}

TEST_CASE("nearest correlation matrix") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 6;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = u(rng);
    auto c = nearest_correlation(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    CHECK((c.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK((c - c.transpose()).norm() == 0.0);
    // A valid correlation matrix is its own projection.
    CHECK((nearest_correlation(c) - c).norm() <= 1e-8);
  }
}

TEST_CASE("simulated returns") {
  auto a = simulate_returns(42, 5, 60), b = simulate_returns(42, 5, 60);
  CHECK(a.rows() == 60);
  CHECK(a.cols() == 5);
  CHECK(a == b);
  CHECK(simulate_returns(43, 5, 60) != a);

  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    auto m = simulate_model(seed, 5);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.covariance);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    CHECK((m.covariance.diagonal().array() - 0.01).abs().maxCoeff() <= 1e-12);
    const int days = 100000;
    auto r = sample_returns(m, seed + 100, days);
    Eigen::VectorXd mean = r.colwise().mean();
    for (int i = 0; i < 5; ++i) CHECK(std::abs(mean[i] - m.mean[i]) <= 3 * 0.1 / std::sqrt(days));
  }
}

TEST_CASE("study table shape and cell re-evaluation") {
  auto c = small_config();
  c.count = 1;
  c.s_grid = {1.0};
  auto r = run_study(c);
  REQUIRE(r.tables.size() == 4);
  for (const auto& t : r.tables)
    for (const auto& row : t.cells) CHECK(row.size() == 1);
  CHECK(r.failures[0] == 0);

  auto c2 = small_config();
  auto r2 = run_study(c2);
  auto windows = study_windows(c2);
  const auto ref = client_reference(c2);
  for (std::size_t k = 0; k < c2.s_grid.size(); ++k) {
    REQUIRE(r2.included[k] == c2.count);
    for (int p = 0; p < 3; ++p) {
      double oce = 0, spec = 0;
      for (int e = 0; e < c2.count; ++e) {
        auto in = ForwardProblem::portfolio(merge_duplicate_rows(windows[e].in_sample));
        auto z = loss_of(in, r2.runs[e][k].x[p]);
        oce += evaluate({Entropic{c2.s_grid[k]}}, z);
        spec += evaluate(ref, z);
      }
      CHECK(std::abs(r2.table("oce", true).cells[p][k] - 100 * oce / c2.count) <= 1e-9);
      CHECK(std::abs(r2.table("spec", true).cells[p][k] - 100 * spec / c2.count) <= 1e-9);
    }
  }
}

TEST_CASE("study output is identical across thread counts") {
  auto c = small_config();
  auto dir = std::filesystem::temp_directory_path() / "invrisk_study_test";
  std::filesystem::remove_all(dir);
  c.out_dir = (dir / "one").string();
  write_study(c, run_study(c));
  c.jobs = 3;
  c.out_dir = (dir / "three").string();
  write_study(c, run_study(c));
  for (auto name : {"in_sample_oce.csv", "in_sample_spec.csv", "out_of_sample_oce.csv",
                    "out_of_sample_spec.csv", "summary.json"}) {
    auto a = slurp(dir / "one" / name);
    CHECK(!a.empty());
    CHECK(a == slurp(dir / "three" / name));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("historical windows from the bundled sample") {
  ExperimentConfig c;
  c.mode = StudyMode::Historical;
  c.data_path = std::string(INVRISK_DATA_DIR) + "/sample_returns.csv";
  c.count = 10;
  c.s_grid = {1.0};
  auto w = study_windows(c);
  REQUIRE(w.size() == 10);
  CHECK(w[0].in_sample.rows() == 30);
  CHECK(w[0].out_sample.rows() == 30);
  CHECK(w[0].in_sample.cols() == 5);
  auto r = run_study(c);
  CHECK(r.failures[0] == 0);
  CHECK(r.included[0] == 10);

  c.data_path = "/nonexistent/returns.csv";
  try {
    run_study(c);
    FAIL("expected DataMissing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DataMissing);
  }
}

TEST_CASE("config parsing and validation") {
  auto c = config_from_json(nlohmann::json::parse(
      R"({"mode": "historical", "count": 7, "s_grid": [1, 2], "alpha": "3/4", "data": "x.csv", "jobs": 2})"));
  CHECK(c.mode == StudyMode::Historical);
  CHECK(c.count == 7);
  CHECK(c.s_grid == std::vector<double>{1, 2});
  CHECK(c.alpha == Rational(3, 4));
  CHECK(c.jobs == 2);
  auto back = config_from_json(config_to_json(c));
  CHECK(back.alpha == c.alpha);
  CHECK(back.data_path == "x.csv");

  ExperimentConfig bad;
  bad.s_grid = {-1};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = ExperimentConfig{};
  bad.lambda = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"mode": "other"})")), Error);
}

TEST_CASE("illustration grid") {
  ExperimentConfig c;
  c.s_grid = {0.01, 100};
  auto r = illustrate(c, 11);
  REQUIRE(r.axis.size() == 11);
  REQUIRE(r.values.size() == 3);
  auto at = [&](int k, int i, int j) { return r.values[k][static_cast<std::size_t>(i * 11 + j)]; };
  CHECK(std::abs(at(0, 5, 5)) <= 1e-12);
  for (int i = 0; i < 11; ++i) CHECK(at(0, i, i) == doctest::Approx(r.axis[i]).epsilon(1e-9));
  for (std::size_t k = 1; k < r.values.size(); ++k)
    for (int i = 0; i < 11; ++i) CHECK(std::abs(at(k, i, i) - r.axis[i]) <= 1e-8);

  // The imputed function does not exceed the reference at the observed loss.
  auto p = ForwardProblem::portfolio(ScenarioMap::uniform(illustration_returns()));
  for (const auto& run : r.runs) {
    auto z = loss_of(p, run.x[EntropicPortfolio]);
    CHECK(evaluate(run.imputed, z) <= evaluate(rho_spec(), z) + 1e-9);
    CHECK(evaluate(run.imputed, z) >= evaluate(rho_spec(), z) - run.deviation - 1e-9);
  }
  auto csv = r.to_csv();
  CHECK(csv.rfind("z1,z2,reference,imputed_s=0.01,imputed_s=100\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 121);
}
