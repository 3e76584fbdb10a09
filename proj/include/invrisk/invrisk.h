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

/* C interface to the invrisk library. Every function returns a status code;
 * on failure invrisk_last_error() describes the problem for the calling
 * thread. Strings returned through char** are owned by the caller and must
 * be released with invrisk_string_free. JSON literals follow the formats in
 * README.md. */
#ifndef INVRISK_H
#define INVRISK_H

#include <stddef.h>

#if defined(_WIN32)
#define INVRISK_API __declspec(dllexport)
#else
#define INVRISK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum invrisk_status {
  INVRISK_OK = 0,
  INVRISK_INVALID_ARGUMENT = 1,
  INVRISK_CAP_EXCEEDED = 2,
  INVRISK_INCOMPATIBLE_M = 3,
  INVRISK_PARAMETER_OUT_OF_RANGE = 4,
  INVRISK_UNSUPPORTED = 5,
  INVRISK_DIMENSION_MISMATCH = 6,
  INVRISK_TOO_LARGE = 7,
  INVRISK_INFEASIBLE = 8,
  INVRISK_UNBOUNDED = 9,
  INVRISK_SOLVER_FAILURE = 10,
  INVRISK_DATA_MISSING = 11,
  INVRISK_PARSE_ERROR = 12,
  INVRISK_INTERNAL = 13
} invrisk_status;

typedef struct invrisk_measure invrisk_measure;
typedef struct invrisk_problem invrisk_problem;
typedef struct invrisk_function invrisk_function;

INVRISK_API const char* invrisk_version(void);
INVRISK_API const char* invrisk_status_name(invrisk_status status);
/* Message of the last failed call on this thread, "" if none. */
INVRISK_API const char* invrisk_last_error(void);
INVRISK_API void invrisk_string_free(char* s);

/* Measures: literals such as "max_loss" or {"cvar": {"alpha": "9/10"}}. */
INVRISK_API invrisk_status invrisk_measure_parse(const char* json, invrisk_measure** out);
INVRISK_API void invrisk_measure_free(invrisk_measure* m);
INVRISK_API invrisk_status invrisk_measure_name(const invrisk_measure* m, char** out);
/* distribution_json: [[value, "num/den"], ...]. */
INVRISK_API invrisk_status invrisk_measure_evaluate(const invrisk_measure* m,
                                                    const char* distribution_json,
                                                    double* value);
/* Loss over n equally likely outcomes. */
INVRISK_API invrisk_status invrisk_measure_evaluate_uniform(const invrisk_measure* m,
                                                            const double* loss, size_t n,
                                                            double* value);

/* Forward problems: {"returns": [[...]]} or {"loss_matrix": [[...]]}, with
 * optional "weights" and "feasible". */
INVRISK_API invrisk_status invrisk_problem_parse(const char* json, invrisk_problem** out);
INVRISK_API void invrisk_problem_free(invrisk_problem* p);
INVRISK_API size_t invrisk_problem_decisions(const invrisk_problem* p);
INVRISK_API size_t invrisk_problem_scenarios(const invrisk_problem* p);

/* x must hold invrisk_problem_decisions(p) entries; objective may be NULL. */
INVRISK_API invrisk_status invrisk_forward_measure(const invrisk_problem* p,
                                                   const invrisk_measure* m, double* x,
                                                   size_t n, double* objective);
INVRISK_API invrisk_status invrisk_forward_entropic(const invrisk_problem* p, double s,
                                                    double* x, size_t n, double* objective);
INVRISK_API invrisk_status invrisk_forward_function(const invrisk_problem* p,
                                                    const invrisk_function* f, double* x,
                                                    size_t n, double* objective);

/* Imputation from an instance document. result_json receives the deviation,
 * vertex values and the serialized function; function may be NULL. Returns
 * INVRISK_INFEASIBLE when no candidate function exists. */
INVRISK_API invrisk_status invrisk_impute_json(const char* instance_json, char** result_json,
                                               invrisk_function** function);
INVRISK_API invrisk_status invrisk_diagnose_json(const char* instance_json, char** report_json);

INVRISK_API invrisk_status invrisk_function_parse(const char* json, invrisk_function** out);
INVRISK_API invrisk_status invrisk_function_to_json(const invrisk_function* f, char** out);
INVRISK_API void invrisk_function_free(invrisk_function* f);
INVRISK_API invrisk_status invrisk_function_evaluate(const invrisk_function* f,
                                                     const char* distribution_json,
                                                     double* value);

/* Experiment drivers. The config document may set out_dir, seed and jobs;
 * output files are written there and a summary is returned. */
INVRISK_API invrisk_status invrisk_illustrate(const char* config_json, char** summary_json);
INVRISK_API invrisk_status invrisk_study(const char* config_json, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* INVRISK_H */
