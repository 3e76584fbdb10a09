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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "invrisk/errors.hpp"
#include "invrisk/io.hpp"
#include "oracles.hpp"

using namespace invrisk;

TEST_CASE("rationals and distributions round-trip exactly") {
  CHECK(rational_from_json("9/10") == Rational(9, 10));
  CHECK(rational_from_json(3) == Rational(3));
  CHECK(rational_from_json(0.25) == Rational(1, 4));
  CHECK(rational_from_json(rational_to_json(Rational(-7, 12))) == Rational(-7, 12));
  CHECK_THROWS_AS(rational_from_json("x/2"), Error);

  DiscreteDistribution d({0.1, -0.3, 2.5}, {Rational(1, 3), Rational(1, 6), Rational(1, 2)});
  auto back = distribution_from_json(distribution_to_json(d));
  CHECK(back == d);
}

TEST_CASE("measure literals round-trip") {
  std::vector<ReferenceMeasure> ms{{MaxLoss{}},
                                   {Expectation{}},
                                   {MeanAbsDev{0.3}},
                                   {MeanUpperSemidev{0.5, 2}},
                                   {CVaR{Rational(9, 10)}},
                                   mix_to_spectral(0.2, Rational(9, 10)),
                                   {Entropic{0.7}}};
  DiscreteDistribution d({0.1, -0.3, 2.5, 1.0}, {Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)});
  for (const auto& m : ms) {
    auto back = measure_from_json(measure_to_json(m));
    CHECK(back.name() == m.name());
    CHECK(evaluate(back, d) == evaluate(m, d));
  }
  CHECK_THROWS_AS(measure_from_json("unknown"), Error);
  CHECK_THROWS_AS(measure_from_json(json{{"cvar", {{"alpha", "3/2"}}}}), Error);
}

TEST_CASE("imputed functions round-trip with identical values") {
  std::mt19937_64 rng(17);
  Eigen::MatrixXd r(3, 2);
  r << 0.03, 0.12, -0.07, -0.15, 0.01, 0.02;
  auto p = ForwardProblem::portfolio(ScenarioMap::uniform(r));
  auto back_problem = problem_from_json(problem_to_json(p));
  CHECK(back_problem.loss_matrix() == p.loss_matrix());
  CHECK(back_problem.weights() == p.weights());

  for (auto family : {Family::Cvx, Family::CvxMeasure, Family::LawInvCvx, Family::LawInvCvxMeasure}) {
    InverseInstance inst{{Observation{p, Eigen::Vector2d(0, 1)}},
                         mix_to_spectral(0.2, Rational(9, 10)),
                         {},
                         family,
                         {}};
    auto res = impute(inst);
    auto back = function_from_json(function_to_json(res.function));
    for (int trial = 0; trial < 20; ++trial) {
      RandomLoss z(oracle::random_vector(rng, 3, -0.2, 0.2), p.space());
      CHECK(evaluate(back, z) == evaluate(res.function, z));
    }
    auto j = result_to_json(res);
    CHECK(j.at("deviation").get<double>() == res.deviation);
  }
}

TEST_CASE("instance documents") {
  auto j = json::parse(R"({
    "reference": {"spectral_mix": {"lambda": 0.2, "alpha": "9/10"}},
    "family": "cvx_measure",
    "observations": [{"problem": {"returns": [[0.0325, 0.1370], [-0.0755, -0.1712]]}, "x": [1, 0]}],
    "preferences": [{"lower": [[0, "1"]], "upper": {"loss": [0.1, 0.2]}}],
    "options": {"lift_cap": 100}
  })");
  auto inst = instance_from_json(j);
  CHECK(inst.family == Family::CvxMeasure);
  CHECK(inst.observations.size() == 1);
  CHECK(inst.preferences.size() == 1);
  CHECK(inst.options.lift_cap == 100);
  CHECK_THROWS_AS(instance_from_json(json::parse(R"({"family": "cvx"})")), std::exception);
}

TEST_CASE("returns CSV") {
  auto path = std::filesystem::temp_directory_path() / "invrisk_returns_test.csv";
  {
    std::ofstream f(path);
    f << "date,a,b\n2020-01-01,0.01,-0.02\n2020-01-02,0.03,0.04\n";
  }
  auto m = read_returns_csv(path.string());
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 2);
  CHECK(m(0, 1) == -0.02);
  CHECK(m(1, 0) == 0.03);
  {
    std::ofstream f(path);
    f << "date,a,b\n2020-01-01,0.01\n";
  }
  CHECK_THROWS_AS(read_returns_csv(path.string()), Error);
  std::filesystem::remove(path);
  try {
    read_returns_csv(path.string());
    FAIL("expected DataMissing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DataMissing);
  }
}
