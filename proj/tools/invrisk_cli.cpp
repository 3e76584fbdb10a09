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

// Command-line front end over the C interface.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "invrisk/invrisk.h"

namespace {

using nlohmann::json;

constexpr int kExitFailure = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitDataError = 3;

struct Failure {
  invrisk_status status;
};

int exit_code(invrisk_status s) {
  switch (s) {
    case INVRISK_OK: return 0;
    case INVRISK_INFEASIBLE: return kExitInfeasible;
    case INVRISK_DATA_MISSING:
    case INVRISK_PARSE_ERROR:
    case INVRISK_DIMENSION_MISMATCH: return kExitDataError;
    default: return kExitFailure;
  }
}

void check(invrisk_status s) {
  if (s != INVRISK_OK) throw Failure{s};
}

std::string take(char* s) {
  std::string out(s);
  invrisk_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    throw Failure{INVRISK_DATA_MISSING};
  }
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// "@path" reads a file; anything else is taken as a JSON literal.
std::string literal_or_file(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return read_file(arg.substr(1));
  return arg;
}

// Bare measure names such as max_loss need no JSON quoting.
std::string measure_literal(const std::string& arg) {
  bool bare = !arg.empty();
  for (char c : arg) bare = bare && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
  return bare ? "\"" + arg + "\"" : literal_or_file(arg);
}

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    std::cerr << "error: " << what << ": " << e.what() << "\n";
    throw Failure{INVRISK_PARSE_ERROR};
  }
}

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RunOptions {
  std::string config;
  std::string out_dir;
  std::vector<double> s_grid;
  long long seed = -1;
  int jobs = 0;
  int count = 0;
  std::string mode;
  std::string data;
};

std::string merged_config(const RunOptions& o) {
  json c = o.config.empty() ? json::object() : parse_json(read_file(o.config), "config");
  if (!o.out_dir.empty()) c["out_dir"] = o.out_dir;
  if (!o.s_grid.empty()) c["s_grid"] = o.s_grid;
  if (o.seed >= 0) c["seed"] = o.seed;
  if (o.jobs > 0) c["jobs"] = o.jobs;
  if (o.count > 0) c["count"] = o.count;
  if (!o.mode.empty()) c["mode"] = o.mode;
  if (!o.data.empty()) c["data"] = o.data;
  return c.dump();
}

void add_run_flags(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "JSON config file");
  cmd->add_option("--out-dir", o.out_dir, "Output directory");
  cmd->add_option("--s-grid", o.s_grid, "Entropic parameters, comma separated")->delimiter(',');
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--jobs", o.jobs, "Worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse optimization of convex risk functions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(invrisk_version()));

  auto* eval = app.add_subcommand("eval", "Evaluate a measure at a distribution or loss");
  std::string measure_arg, dist_arg, function_arg;
  std::vector<double> loss;
  eval->add_option("--measure", measure_arg, "Measure literal or @file");
  eval->add_option("--function", function_arg, "Imputed function file (@file or literal)");
  eval->add_option("--distribution", dist_arg, "[[value, \"p\"], ...] or @file");
  eval->add_option("--loss", loss, "Equally likely losses, comma separated")->delimiter(',');

  auto* forward = app.add_subcommand("forward", "Solve a risk minimization problem");
  std::string problem_arg;
  double entropic_s = 0;
  forward->add_option("--problem", problem_arg, "Problem literal or @file")->required();
  forward->add_option("--measure", measure_arg, "Measure literal or @file");
  forward->add_option("--function", function_arg, "Imputed function literal or @file");
  forward->add_option("--entropic", entropic_s, "Entropic parameter s");

  auto* imp = app.add_subcommand("impute", "Impute a risk function from an instance");
  std::string instance_arg, family, result_out;
  imp->add_option("--instance", instance_arg, "Instance literal or @file")->required();
  imp->add_option("--family", family, "cvx, cvx_measure, lawinv_cvx or lawinv_cvx_measure");
  imp->add_option("--out", result_out, "Write the result JSON here instead of stdout");

  RunOptions illus_opts, study_opts;
  auto* illus = app.add_subcommand("illustrate", "Two-asset illustration grids");
  add_run_flags(illus, illus_opts);
  auto* study = app.add_subcommand("study", "Simulated or historical study tables");
  add_run_flags(study, study_opts);
  study->add_option("--count", study_opts.count, "Number of experiments");
  study->add_option("--mode", study_opts.mode, "simulate or historical");
  study->add_option("--data", study_opts.data, "Historical returns CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval) {
      if (measure_arg.empty() == function_arg.empty()) {
        std::cerr << "error: give exactly one of --measure and --function\n";
        return kExitFailure;
      }
      if (dist_arg.empty() == loss.empty()) {
        std::cerr << "error: give exactly one of --distribution and --loss\n";
        return kExitFailure;
      }
      std::string dist = dist_arg.empty() ? std::string() : literal_or_file(dist_arg);
      if (dist.empty()) {
        json d = json::array();
        const std::string p = "1/" + std::to_string(loss.size());
        for (double v : loss) d.push_back(json::array({v, p}));
        dist = d.dump();
      }
      double value = 0;
      if (!measure_arg.empty()) {
        invrisk_measure* m = nullptr;
        check(invrisk_measure_parse(measure_literal(measure_arg).c_str(), &m));
        auto s = invrisk_measure_evaluate(m, dist.c_str(), &value);
        invrisk_measure_free(m);
        check(s);
      } else {
        invrisk_function* f = nullptr;
        check(invrisk_function_parse(literal_or_file(function_arg).c_str(), &f));
        auto s = invrisk_function_evaluate(f, dist.c_str(), &value);
        invrisk_function_free(f);
        check(s);
      }
      std::cout << number(value) << "\n";
    } else if (*forward) {
      int given = !measure_arg.empty() + !function_arg.empty() + (entropic_s > 0);
      if (given != 1) {
        std::cerr << "error: give exactly one of --measure, --function and --entropic\n";
        return kExitFailure;
      }
      invrisk_problem* p = nullptr;
      check(invrisk_problem_parse(literal_or_file(problem_arg).c_str(), &p));
      std::vector<double> x(invrisk_problem_decisions(p));
      double obj = 0;
      invrisk_status s;
      if (entropic_s > 0) {
        s = invrisk_forward_entropic(p, entropic_s, x.data(), x.size(), &obj);
      } else if (!measure_arg.empty()) {
        invrisk_measure* m = nullptr;
        s = invrisk_measure_parse(measure_literal(measure_arg).c_str(), &m);
        if (s == INVRISK_OK) s = invrisk_forward_measure(p, m, x.data(), x.size(), &obj);
        invrisk_measure_free(m);
      } else {
        invrisk_function* f = nullptr;
        s = invrisk_function_parse(literal_or_file(function_arg).c_str(), &f);
        if (s == INVRISK_OK) s = invrisk_forward_function(p, f, x.data(), x.size(), &obj);
        invrisk_function_free(f);
      }
      invrisk_problem_free(p);
      check(s);
      std::cout << json{{"x", x}, {"objective", obj}}.dump(2) << "\n";
    } else if (*imp) {
      json inst = parse_json(literal_or_file(instance_arg), "instance");
      if (!family.empty()) inst["family"] = family;
      const std::string text = inst.dump();
      char* result = nullptr;
      auto s = invrisk_impute_json(text.c_str(), &result, nullptr);
      if (s == INVRISK_INFEASIBLE) {
        std::cerr << "error: " << invrisk_last_error() << "\n";
        char* report = nullptr;
        if (invrisk_diagnose_json(text.c_str(), &report) == INVRISK_OK)
          std::cout << take(report) << "\n";
        return kExitInfeasible;
      }
      check(s);
      auto out = take(result);
      if (result_out.empty()) {
        std::cout << out << "\n";
      } else {
        std::ofstream f(result_out, std::ios::binary);
        f << out << "\n";
        if (!f) {
          std::cerr << "error: cannot write " << result_out << "\n";
          return kExitDataError;
        }
      }
    } else if (*illus || *study) {
      const auto config = merged_config(*illus ? illus_opts : study_opts);
      char* summary = nullptr;
      check(*illus ? invrisk_illustrate(config.c_str(), &summary)
                   : invrisk_study(config.c_str(), &summary));
      std::cout << take(summary) << "\n";
    }
  } catch (const Failure& f) {
    if (*invrisk_last_error()) std::cerr << "error: " << invrisk_last_error() << "\n";
    return exit_code(f.status);
  }
  return 0;
}
