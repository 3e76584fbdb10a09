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

#include "invrisk/invrisk.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "invrisk/errors.hpp"
#include "invrisk/experiments.hpp"
#include "invrisk/io.hpp"

struct invrisk_measure {
  invrisk::ReferenceMeasure m;
};
struct invrisk_problem {
  invrisk::ForwardProblem p;
};
struct invrisk_function {
  invrisk::DualPwlRiskFunction f;
};

namespace {

using namespace invrisk;

thread_local std::string last_error;

invrisk_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return INVRISK_INVALID_ARGUMENT;
    case ErrorCode::CapExceeded: return INVRISK_CAP_EXCEEDED;
    case ErrorCode::IncompatibleM: return INVRISK_INCOMPATIBLE_M;
    case ErrorCode::ParameterOutOfRange: return INVRISK_PARAMETER_OUT_OF_RANGE;
    case ErrorCode::UnsupportedMeasure:
    case ErrorCode::UnsupportedSet: return INVRISK_UNSUPPORTED;
    case ErrorCode::DimensionMismatch: return INVRISK_DIMENSION_MISMATCH;
    case ErrorCode::TooLarge: return INVRISK_TOO_LARGE;
    case ErrorCode::Infeasible: return INVRISK_INFEASIBLE;
    case ErrorCode::Unbounded: return INVRISK_UNBOUNDED;
    case ErrorCode::SolverFailure: return INVRISK_SOLVER_FAILURE;
    case ErrorCode::DataMissing: return INVRISK_DATA_MISSING;
    case ErrorCode::ParseError: return INVRISK_PARSE_ERROR;
  }
  return INVRISK_INTERNAL;
}

template <class F>
invrisk_status guard(F&& body) {
  last_error.clear();
  try {
    body();
    return INVRISK_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const json::exception& e) {
    last_error = std::string("ParseError: ") + e.what();
    return INVRISK_PARSE_ERROR;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return INVRISK_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return INVRISK_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse(const char* text, const char* what) {
  need(text, what);
  return json::parse(text);
}

void store(const ForwardSolution& s, double* x, std::size_t n, double* objective) {
  if (n < static_cast<std::size_t>(s.x.size()))
    fail(ErrorCode::DimensionMismatch, "output buffer holds " + std::to_string(n) + " entries, need " +
                                           std::to_string(s.x.size()));
  for (Eigen::Index i = 0; i < s.x.size(); ++i) x[i] = s.x[i];
  if (objective) *objective = s.objective;
}

ExperimentConfig config_of(const char* text) {
  auto j = parse(text, "config");
  return config_from_json(j);
}

}  // namespace

extern "C" {

const char* invrisk_version(void) { return "0.1.0"; }

const char* invrisk_status_name(invrisk_status status) {
  switch (status) {
    case INVRISK_OK: return "ok";
    case INVRISK_INVALID_ARGUMENT: return "invalid_argument";
    case INVRISK_CAP_EXCEEDED: return "cap_exceeded";
    case INVRISK_INCOMPATIBLE_M: return "incompatible_m";
    case INVRISK_PARAMETER_OUT_OF_RANGE: return "parameter_out_of_range";
    case INVRISK_UNSUPPORTED: return "unsupported";
    case INVRISK_DIMENSION_MISMATCH: return "dimension_mismatch";
    case INVRISK_TOO_LARGE: return "too_large";
    case INVRISK_INFEASIBLE: return "infeasible";
    case INVRISK_UNBOUNDED: return "unbounded";
    case INVRISK_SOLVER_FAILURE: return "solver_failure";
    case INVRISK_DATA_MISSING: return "data_missing";
    case INVRISK_PARSE_ERROR: return "parse_error";
    case INVRISK_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* invrisk_last_error(void) { return last_error.c_str(); }

void invrisk_string_free(char* s) { delete[] s; }

invrisk_status invrisk_measure_parse(const char* text, invrisk_measure** out) {
  return guard([&] {
    need(out, "out");
    *out = new invrisk_measure{measure_from_json(parse(text, "measure"))};
  });
}

void invrisk_measure_free(invrisk_measure* m) { delete m; }

invrisk_status invrisk_measure_name(const invrisk_measure* m, char** out) {
  return guard([&] {
    need(m, "measure");
    need(out, "out");
    *out = dup(m->m.name());
  });
}

invrisk_status invrisk_measure_evaluate(const invrisk_measure* m, const char* distribution_json,
                                        double* value) {
  return guard([&] {
    need(m, "measure");
    need(value, "value");
    *value = evaluate(m->m, distribution_from_json(parse(distribution_json, "distribution")));
  });
}

invrisk_status invrisk_measure_evaluate_uniform(const invrisk_measure* m, const double* loss,
                                                size_t n, double* value) {
  return guard([&] {
    need(m, "measure");
    need(loss, "loss");
    need(value, "value");
    if (n == 0) fail(ErrorCode::InvalidArgument, "empty loss");
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(loss, static_cast<Eigen::Index>(n));
    *value = evaluate(m->m, RandomLoss(v, OutcomeSpace::uniform(static_cast<int>(n))));
  });
}

invrisk_status invrisk_problem_parse(const char* text, invrisk_problem** out) {
  return guard([&] {
    need(out, "out");
    *out = new invrisk_problem{problem_from_json(parse(text, "problem"))};
  });
}

void invrisk_problem_free(invrisk_problem* p) { delete p; }

size_t invrisk_problem_decisions(const invrisk_problem* p) {
  return p ? static_cast<size_t>(p->p.num_decisions()) : 0;
}

size_t invrisk_problem_scenarios(const invrisk_problem* p) {
  return p ? static_cast<size_t>(p->p.num_scenarios()) : 0;
}

invrisk_status invrisk_forward_measure(const invrisk_problem* p, const invrisk_measure* m,
                                       double* x, size_t n, double* objective) {
  return guard([&] {
    need(p, "problem");
    need(m, "measure");
    need(x, "x");
    if (std::holds_alternative<Entropic>(m->m.m))
      store(solve_forward_entropic(p->p, std::get<Entropic>(m->m.m).s), x, n, objective);
    else
      store(solve_forward(p->p, m->m), x, n, objective);
  });
}

invrisk_status invrisk_forward_entropic(const invrisk_problem* p, double s, double* x, size_t n,
                                        double* objective) {
  return guard([&] {
    need(p, "problem");
    need(x, "x");
    store(solve_forward_entropic(p->p, s), x, n, objective);
  });
}

invrisk_status invrisk_forward_function(const invrisk_problem* p, const invrisk_function* f,
                                        double* x, size_t n, double* objective) {
  return guard([&] {
    need(p, "problem");
    need(f, "function");
    need(x, "x");
    store(solve_forward(p->p, f->f), x, n, objective);
  });
}

invrisk_status invrisk_impute_json(const char* instance_json, char** result_json,
                                   invrisk_function** function) {
  return guard([&] {
    need(result_json, "result_json");
    auto inst = instance_from_json(parse(instance_json, "instance"));
    auto r = impute(inst);
    auto text = dup(result_to_json(r).dump(2));
    if (function) *function = new invrisk_function{r.function};
    *result_json = text;
  });
}

invrisk_status invrisk_diagnose_json(const char* instance_json, char** report_json) {
  return guard([&] {
    need(report_json, "report_json");
    auto inst = instance_from_json(parse(instance_json, "instance"));
    *report_json = dup(report_to_json(diagnose_infeasibility(inst)).dump(2));
  });
}

invrisk_status invrisk_function_parse(const char* text, invrisk_function** out) {
  return guard([&] {
    need(out, "out");
    auto j = parse(text, "function");
    // Accept a full imputation result as well as the bare function.
    if (j.is_object() && !j.contains("kind") && j.contains("function")) j = j.at("function");
    *out = new invrisk_function{function_from_json(j)};
  });
}

invrisk_status invrisk_function_to_json(const invrisk_function* f, char** out) {
  return guard([&] {
    need(f, "function");
    need(out, "out");
    *out = dup(function_to_json(f->f).dump(2));
  });
}

void invrisk_function_free(invrisk_function* f) { delete f; }

invrisk_status invrisk_function_evaluate(const invrisk_function* f, const char* distribution_json,
                                         double* value) {
  return guard([&] {
    need(f, "function");
    need(value, "value");
    *value = evaluate(f->f, distribution_from_json(parse(distribution_json, "distribution")));
  });
}

invrisk_status invrisk_illustrate(const char* config_json, char** summary_json) {
  return guard([&] {
    need(summary_json, "summary_json");
    auto c = config_of(config_json);
    auto r = illustrate(c);
    write_illustration(c, r);
    *summary_json = dup(r.summary().dump(2));
  });
}

invrisk_status invrisk_study(const char* config_json, char** summary_json) {
  return guard([&] {
    need(summary_json, "summary_json");
    auto c = config_of(config_json);
    auto r = run_study(c);
    write_study(c, r);
    auto s = r.summary();
    s["config"] = config_to_json(c);
    *summary_json = dup(s.dump(2));
  });
}

}  // extern "C"
