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

#include "invrisk/io.hpp"

#include <fstream>
#include <sstream>

namespace invrisk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::ParseError, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

std::vector<Rational> rationals_from_json(const json& j) {
  if (!j.is_array()) bad("expected an array of rationals");
  std::vector<Rational> out;
  for (const auto& x : j) out.push_back(rational_from_json(x));
  return out;
}

json rationals_to_json(const std::vector<Rational>& r) {
  json out = json::array();
  for (const auto& x : r) out.push_back(rational_to_json(x));
  return out;
}

}  // namespace

Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number()) {
    std::ostringstream os;
    os.precision(15);
    os << j.get<double>();
    return parse_rational(os.str());
  }
  bad("expected a rational such as \"9/10\"");
}

json rational_to_json(const Rational& r) { return rational_to_string(r); }

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) bad("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = number(j[i], "vector entry");
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array()) bad("expected an array of rows");
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad("ragged matrix");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(j[r][c], "matrix entry");
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

DiscreteDistribution distribution_from_json(const json& j) {
  if (!j.is_array() || j.empty()) bad("distribution literal must be a non-empty list of [value, prob]");
  std::vector<double> values;
  std::vector<Rational> probs;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2) bad("distribution entries are [value, \"num/den\"]");
    values.push_back(number(pair[0], "support value"));
    probs.push_back(rational_from_json(pair[1]));
  }
  return DiscreteDistribution(values, probs);
}

json distribution_to_json(const DiscreteDistribution& d) {
  json out = json::array();
  for (int o = 0; o < d.size(); ++o)
    out.push_back(json::array({d.support()[o], rational_to_string(d.probs()[o])}));
  return out;
}

ReferenceMeasure measure_from_json(const json& j) {
  std::string key;
  json body = json::object();
  if (j.is_string()) {
    key = j.get<std::string>();
  } else if (j.is_object() && j.size() == 1) {
    key = j.begin().key();
    body = j.begin().value();
  } else {
    bad("measure literal must be a name or a single-key object");
  }
  ReferenceMeasure m;
  if (key == "max_loss") {
    m.m = MaxLoss{};
  } else if (key == "expectation") {
    m.m = Expectation{};
  } else if (key == "mad") {
    m.m = MeanAbsDev{number(field(body, "gamma"), "gamma")};
  } else if (key == "semidev") {
    int order = body.contains("order") ? body.at("order").get<int>() : 2;
    m.m = MeanUpperSemidev{number(field(body, "gamma"), "gamma"), order};
  } else if (key == "cvar") {
    m.m = CVaR{rational_from_json(field(body, "alpha"))};
  } else if (key == "spectral") {
    StepwiseSpectral s;
    s.levels = vector_from_json(field(body, "levels"));
    s.breakpoints = rationals_from_json(field(body, "breakpoints"));
    if (body.contains("zero_first_level")) s.zero_first_level = body.at("zero_first_level").get<bool>();
    m.m = s;
  } else if (key == "spectral_mix") {
    m = mix_to_spectral(number(field(body, "lambda"), "lambda"),
                        rational_from_json(field(body, "alpha")));
  } else if (key == "cvar_spectral") {
    m = cvar_as_spectral(rational_from_json(field(body, "alpha")));
  } else if (key == "entropic") {
    m.m = Entropic{number(field(body, "s"), "s")};
  } else if (key == "mix") {
    Mix x;
    for (const auto& w : field(body, "weights")) x.weights.push_back(number(w, "mix weight"));
    for (const auto& p : field(body, "parts")) x.parts.push_back(measure_from_json(p));
    m.m = x;
  } else {
    bad("unknown measure '" + key + "'");
  }
  validate(m);
  return m;
}

json measure_to_json(const ReferenceMeasure& m) {
  return std::visit(
      overloaded{
          [](const MaxLoss&) { return json("max_loss"); },
          [](const Expectation&) { return json("expectation"); },
          [](const MeanAbsDev& x) { return json{{"mad", {{"gamma", x.gamma}}}}; },
          [](const MeanUpperSemidev& x) {
            return json{{"semidev", {{"gamma", x.gamma}, {"order", x.order}}}};
          },
          [](const CVaR& x) { return json{{"cvar", {{"alpha", rational_to_string(x.alpha)}}}}; },
          [](const StepwiseSpectral& x) {
            json body{{"levels", vector_to_json(x.levels)},
                      {"breakpoints", rationals_to_json(x.breakpoints)}};
            if (x.zero_first_level) body["zero_first_level"] = true;
            return json{{"spectral", body}};
          },
          [](const Entropic& x) { return json{{"entropic", {{"s", x.s}}}}; },
          [](const Mix& x) {
            json parts = json::array();
            for (const auto& p : x.parts) parts.push_back(measure_to_json(p));
            return json{{"mix", {{"weights", x.weights}, {"parts", parts}}}};
          },
      },
      m.m);
}

SubgradientSet set_from_json(const json& j) {
  std::string kind = field(j, "kind").get<std::string>();
  if (kind == "simplex") return SubgradientSet{FullSimplex{field(j, "dim").get<int>()}};
  if (kind == "singleton") return SubgradientSet{Singleton{vector_from_json(field(j, "point"))}};
  if (kind == "cvar_box")
    return SubgradientSet{CVaRBox{rational_from_json(field(j, "alpha")),
                                  rationals_from_json(field(j, "weights"))}};
  if (kind == "mad")
    return SubgradientSet{MADSet{number(field(j, "gamma"), "gamma"),
                                 rationals_from_json(field(j, "weights"))}};
  if (kind == "semidev")
    return SubgradientSet{SemidevSOC{number(field(j, "gamma"), "gamma"),
                                     rationals_from_json(field(j, "weights"))}};
  if (kind == "transportation")
    return SubgradientSet{TransportationPolytope{vector_from_json(field(j, "levels")),
                                                 rationals_from_json(field(j, "level_masses")),
                                                 rationals_from_json(field(j, "weights"))}};
  if (kind == "polyhedron") {
    Polyhedron p;
    int dim = field(j, "dim").get<int>();
    p.A = j.contains("A") ? matrix_from_json(j.at("A")) : Eigen::MatrixXd(0, dim);
    p.b = j.contains("b") ? vector_from_json(j.at("b")) : Eigen::VectorXd(0);
    p.E = j.contains("E") ? matrix_from_json(j.at("E")) : Eigen::MatrixXd(0, dim);
    p.f = j.contains("f") ? vector_from_json(j.at("f")) : Eigen::VectorXd(0);
    if (p.A.rows() == 0) p.A.resize(0, dim);
    if (p.E.rows() == 0) p.E.resize(0, dim);
    return SubgradientSet{p};
  }
  if (kind == "mix") {
    MinkowskiMix m;
    for (const auto& w : field(j, "lambdas")) m.lambdas.push_back(number(w, "lambda"));
    for (const auto& p : field(j, "parts")) m.parts.push_back(set_from_json(p));
    return SubgradientSet{m};
  }
  bad("unknown set kind '" + kind + "'");
}

json set_to_json(const SubgradientSet& c) {
  return std::visit(
      overloaded{
          [](const FullSimplex& s) { return json{{"kind", "simplex"}, {"dim", s.dim}}; },
          [](const Singleton& s) {
            return json{{"kind", "singleton"}, {"point", vector_to_json(s.point)}};
          },
          [](const CVaRBox& s) {
            return json{{"kind", "cvar_box"},
                        {"alpha", rational_to_string(s.alpha)},
                        {"weights", rationals_to_json(s.weights)}};
          },
          [](const MADSet& s) {
            return json{{"kind", "mad"}, {"gamma", s.gamma}, {"weights", rationals_to_json(s.weights)}};
          },
          [](const SemidevSOC& s) {
            return json{{"kind", "semidev"}, {"gamma", s.gamma}, {"weights", rationals_to_json(s.weights)}};
          },
          [](const TransportationPolytope& s) {
            return json{{"kind", "transportation"},
                        {"levels", vector_to_json(s.levels)},
                        {"level_masses", rationals_to_json(s.level_masses)},
                        {"weights", rationals_to_json(s.weights)}};
          },
          [&](const Polyhedron& s) {
            return json{{"kind", "polyhedron"}, {"dim", c.dim()},
                        {"A", matrix_to_json(s.A)}, {"b", vector_to_json(s.b)},
                        {"E", matrix_to_json(s.E)}, {"f", vector_to_json(s.f)}};
          },
          [](const MinkowskiMix& s) {
            json parts = json::array();
            for (const auto& p : s.parts) parts.push_back(set_to_json(p));
            return json{{"kind", "mix"}, {"lambdas", s.lambdas}, {"parts", parts}};
          },
      },
      c.set);
}

ForwardProblem problem_from_json(const json& j) {
  Eigen::MatrixXd w;
  if (j.contains("loss_matrix")) {
    w = matrix_from_json(j.at("loss_matrix"));
  } else if (j.contains("returns")) {
    w = -matrix_from_json(j.at("returns"));
  } else if (j.contains("returns_csv")) {
    w = -read_returns_csv(j.at("returns_csv").get<std::string>());
  } else {
    bad("problem needs 'loss_matrix', 'returns' or 'returns_csv'");
  }
  std::vector<Rational> weights;
  if (j.contains("weights")) {
    weights = rationals_from_json(j.at("weights"));
  } else {
    auto n = static_cast<std::int64_t>(w.rows());
    weights.assign(static_cast<std::size_t>(n), Rational(1, std::max<std::int64_t>(n, 1)));
  }
  FeasibleSet fs;
  if (j.contains("feasible") && !(j.at("feasible").is_string() && j.at("feasible") == "simplex")) {
    const json& f = j.at("feasible");
    fs.simplex = false;
    const auto n = w.cols();
    fs.A = f.contains("A") ? matrix_from_json(f.at("A")) : Eigen::MatrixXd(0, n);
    fs.b = f.contains("b") ? vector_from_json(f.at("b")) : Eigen::VectorXd(0);
    fs.E = f.contains("E") ? matrix_from_json(f.at("E")) : Eigen::MatrixXd(0, n);
    fs.f = f.contains("f") ? vector_from_json(f.at("f")) : Eigen::VectorXd(0);
  }
  return ForwardProblem(w, weights, fs);
}

json problem_to_json(const ForwardProblem& p) {
  json out{{"loss_matrix", matrix_to_json(p.loss_matrix())},
           {"weights", rationals_to_json(p.weights())}};
  if (p.feasible().simplex) {
    out["feasible"] = "simplex";
  } else {
    out["feasible"] = {{"A", matrix_to_json(p.feasible().A)}, {"b", vector_to_json(p.feasible().b)},
                       {"E", matrix_to_json(p.feasible().E)}, {"f", vector_to_json(p.feasible().f)}};
  }
  return out;
}

namespace {

const char* kind_name(PwlKind k) {
  switch (k) {
    case PwlKind::General: return "general";
    case PwlKind::LawInvariant: return "law_invariant";
    case PwlKind::Reduced: return "reduced";
  }
  return "general";
}

}  // namespace

DualPwlRiskFunction function_from_json(const json& j) {
  DualPwlRiskFunction f;
  std::string kind = field(j, "kind").get<std::string>();
  if (kind == "general") f.kind = PwlKind::General;
  else if (kind == "law_invariant") f.kind = PwlKind::LawInvariant;
  else if (kind == "reduced") f.kind = PwlKind::Reduced;
  else bad("unknown function kind '" + kind + "'");
  f.deltas = vector_from_json(field(j, "deltas"));
  f.translation_invariant = j.value("translation_invariant", false);
  f.law_invariant = j.value("law_invariant", f.kind != PwlKind::General);
  if (j.contains("measure")) f.measure = measure_from_json(j.at("measure"));
  if (j.contains("set")) f.set = set_from_json(j.at("set"));
  if (f.kind == PwlKind::Reduced) {
    for (const auto& a : field(j, "atoms")) f.atoms.push_back(distribution_from_json(a));
  } else {
    for (const auto& v : field(j, "vertices")) f.vertices.push_back(vector_from_json(v));
    if (j.contains("weights")) {
      f.space = std::make_shared<const OutcomeSpace>(rationals_from_json(j.at("weights")));
    } else if (!f.vertices.empty()) {
      f.space = OutcomeSpace::uniform(static_cast<int>(f.vertices[0].size()));
    }
  }
  f.validate();
  return f;
}

json function_to_json(const DualPwlRiskFunction& f) {
  json out{{"kind", kind_name(f.kind)},
           {"deltas", vector_to_json(f.deltas)},
           {"translation_invariant", f.translation_invariant},
           {"law_invariant", f.law_invariant}};
  if (f.measure) out["measure"] = measure_to_json(*f.measure);
  if (f.set) out["set"] = set_to_json(*f.set);
  if (f.kind == PwlKind::Reduced) {
    json atoms = json::array();
    for (const auto& a : f.atoms) atoms.push_back(distribution_to_json(a));
    out["atoms"] = atoms;
  } else {
    json verts = json::array();
    for (const auto& v : f.vertices) verts.push_back(vector_to_json(v));
    out["vertices"] = verts;
    out["weights"] = rationals_to_json(f.space->weights());
  }
  return out;
}

namespace {

LossOrDistribution side_from_json(const json& j) {
  if (j.is_array()) return distribution_from_json(j);
  if (j.is_object() && j.contains("loss")) {
    Eigen::VectorXd v = vector_from_json(j.at("loss"));
    SpacePtr space = j.contains("weights")
                         ? std::make_shared<const OutcomeSpace>(rationals_from_json(j.at("weights")))
                         : OutcomeSpace::uniform(static_cast<int>(v.size()));
    return RandomLoss(v, space);
  }
  bad("preference side must be a distribution literal or {\"loss\": [...]}");
}

}  // namespace

InverseInstance instance_from_json(const json& j) {
  InverseInstance inst{{}, measure_from_json(field(j, "reference")), {},
                       parse_family(j.value("family", std::string("lawinv_cvx_measure"))), {}};
  if (j.contains("observations")) {
    for (const auto& ob : j.at("observations"))
      inst.observations.push_back(
          Observation{problem_from_json(field(ob, "problem")), vector_from_json(field(ob, "x"))});
  }
  if (j.contains("preferences")) {
    for (const auto& pr : j.at("preferences"))
      inst.preferences.push_back(
          PreferencePair{side_from_json(field(pr, "lower")), side_from_json(field(pr, "upper"))});
  }
  if (j.contains("options")) {
    const json& o = j.at("options");
    inst.options.feas_tol = o.value("feas_tol", inst.options.feas_tol);
    inst.options.tie_break = o.value("tie_break", inst.options.tie_break);
    inst.options.lift_cap = o.value("lift_cap", inst.options.lift_cap);
  }
  return inst;
}

json result_to_json(const ImputedResult& r) {
  json prefs = json::array();
  for (const auto& [a, b] : r.preference_vertices) prefs.push_back(json::array({a, b}));
  return json{{"deviation", r.deviation},
              {"deltas", vector_to_json(r.deltas)},
              {"reference_values", vector_to_json(r.reference_values)},
              {"observation_vertices", r.observation_vertex},
              {"preference_vertices", prefs},
              {"active", r.active},
              {"solver", {{"status", status_name(r.report.status)},
                          {"max_residual", r.report.max_residual}}},
              {"function", function_to_json(r.function)}};
}

json report_to_json(const InfeasibilityReport& r) {
  json prefs = json::array(), obs = json::array();
  for (const auto& [k, v] : r.preferences) prefs.push_back({{"index", k}, {"violation", v}});
  for (const auto& [k, v] : r.observations) obs.push_back({{"index", k}, {"violation", v}});
  return json{{"feasible", r.feasible},
              {"total_violation", r.total_violation},
              {"preferences", prefs},
              {"observations", obs}};
}

Eigen::MatrixXd read_returns_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::DataMissing, "cannot open returns file " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::DataMissing, "empty returns file " + path);
  std::size_t cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  if (cols == 0) fail(ErrorCode::ParseError, "returns header needs date and asset columns");
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // date
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(cell, &pos));
      } catch (const std::exception&) {
        fail(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != cols)
      fail(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": expected " +
                                      std::to_string(cols) + " returns");
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::DataMissing, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

}  // namespace invrisk
