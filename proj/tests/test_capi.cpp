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
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "invrisk/invrisk.h"

namespace {

const char* kSpec = R"({"spectral_mix": {"lambda": 0.2, "alpha": "9/10"}})";
const char* kProblem = R"({"returns": [[0.0325, 0.1370], [-0.0755, -0.1712]]})";

std::string take(char* s) {
  std::string out(s);
  invrisk_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("measures through the C interface") {
  invrisk_measure* m = nullptr;
  REQUIRE(invrisk_measure_parse(kSpec, &m) == INVRISK_OK);
  double v = 0;
  CHECK(invrisk_measure_evaluate(m, R"([[-0.0325, "1/2"], [0.0755, "1/2"]])", &v) == INVRISK_OK);
  CHECK(std::abs(v - 0.0647) <= 1e-12);
  const double loss[] = {-0.0325, 0.0755};
  CHECK(invrisk_measure_evaluate_uniform(m, loss, 2, &v) == INVRISK_OK);
  CHECK(std::abs(v - 0.0647) <= 1e-12);
  char* name = nullptr;
  CHECK(invrisk_measure_name(m, &name) == INVRISK_OK);
  CHECK(!take(name).empty());
  CHECK(invrisk_measure_evaluate(m, "[[1, \"1/3\"]]", &v) == INVRISK_INVALID_ARGUMENT);
  CHECK(std::strlen(invrisk_last_error()) > 0);
  invrisk_measure_free(m);

  CHECK(invrisk_measure_parse("{", &m) == INVRISK_PARSE_ERROR);
  CHECK(invrisk_measure_parse(R"({"cvar": {"alpha": 2}})", &m) == INVRISK_PARAMETER_OUT_OF_RANGE);
  CHECK(invrisk_measure_parse(nullptr, &m) == INVRISK_INVALID_ARGUMENT);
  CHECK(std::string(invrisk_status_name(INVRISK_INFEASIBLE)) == "infeasible");
}

TEST_CASE("forward solves through the C interface") {
  invrisk_problem* p = nullptr;
  invrisk_measure* m = nullptr;
  REQUIRE(invrisk_problem_parse(kProblem, &p) == INVRISK_OK);
  REQUIRE(invrisk_measure_parse(kSpec, &m) == INVRISK_OK);
  CHECK(invrisk_problem_decisions(p) == 2);
  CHECK(invrisk_problem_scenarios(p) == 2);
  double x[2], obj = 0;
  CHECK(invrisk_forward_measure(p, m, x, 2, &obj) == INVRISK_OK);
  CHECK(std::abs(x[0] - 1) <= 1e-6);
  CHECK(std::abs(obj - 0.0647) <= 1e-9);
  CHECK(invrisk_forward_measure(p, m, x, 1, &obj) == INVRISK_DIMENSION_MISMATCH);
  CHECK(invrisk_forward_entropic(p, 0.01, x, 2, nullptr) == INVRISK_OK);
  CHECK(std::abs(x[1] - 1) <= 1e-3);
  invrisk_measure_free(m);
  invrisk_problem_free(p);
}

TEST_CASE("imputation through the C interface") {
  std::string inst = std::string(R"({"reference": )") + kSpec +
                     R"(, "family": "lawinv_cvx_measure", "observations": [{"problem": )" + kProblem +
                     R"(, "x": [0, 1]}]})";
  char* result = nullptr;
  invrisk_function* f = nullptr;
  REQUIRE(invrisk_impute_json(inst.c_str(), &result, &f) == INVRISK_OK);
  auto text = take(result);
  CHECK(text.find("\"deviation\"") != std::string::npos);

  invrisk_problem* p = nullptr;
  REQUIRE(invrisk_problem_parse(kProblem, &p) == INVRISK_OK);
  double x[2], obj = 0, at_obs = 0;
  CHECK(invrisk_forward_function(p, f, x, 2, &obj) == INVRISK_OK);
  CHECK(invrisk_function_evaluate(f, R"([[-0.1370, "1/2"], [0.1712, "1/2"]])", &at_obs) == INVRISK_OK);
  CHECK(std::abs(obj - at_obs) <= 1e-6);

  char* fj = nullptr;
  REQUIRE(invrisk_function_to_json(f, &fj) == INVRISK_OK);
  invrisk_function* g = nullptr;
  REQUIRE(invrisk_function_parse(fj, &g) == INVRISK_OK);
  invrisk_string_free(fj);
  double again = 0;
  CHECK(invrisk_function_evaluate(g, R"([[-0.1370, "1/2"], [0.1712, "1/2"]])", &again) == INVRISK_OK);
  CHECK(again == at_obs);
  invrisk_function_free(g);
  invrisk_function_free(f);
  invrisk_problem_free(p);

  const char* contradictory =
      R"({"reference": "expectation", "family": "cvx_measure",
          "preferences": [{"lower": {"loss": [2, 3]}, "upper": {"loss": [1, 2]}}]})";
  CHECK(invrisk_impute_json(contradictory, &result, nullptr) == INVRISK_INFEASIBLE);
  char* report = nullptr;
  REQUIRE(invrisk_diagnose_json(contradictory, &report) == INVRISK_OK);
  auto rep = take(report);
  CHECK(rep.find("\"feasible\": false") != std::string::npos);
}

TEST_CASE("errors are reported per thread") {
  invrisk_measure* m = nullptr;
  CHECK(invrisk_measure_parse("{", &m) == INVRISK_PARSE_ERROR);
  std::string other;
  std::thread t([&] { other = invrisk_last_error(); });
  t.join();
  CHECK(other.empty());
  CHECK(std::strlen(invrisk_last_error()) > 0);
  CHECK(invrisk_measure_parse("\"max_loss\"", &m) == INVRISK_OK);
  CHECK(std::strlen(invrisk_last_error()) == 0);
  invrisk_measure_free(m);
}

TEST_CASE("study driver") {
  char* summary = nullptr;
  CHECK(invrisk_study(R"({"mode": "historical", "data": "/nonexistent.csv", "count": 1})", &summary) ==
        INVRISK_DATA_MISSING);
  CHECK(invrisk_study(R"({"mode": "illustrate"})", &summary) == INVRISK_INVALID_ARGUMENT);
}
