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

#include "invrisk/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "invrisk/errors.hpp"
#include "invrisk/io.hpp"

namespace invrisk {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

const char* mode_name(StudyMode m) {
  switch (m) {
    case StudyMode::Illustrate: return "illustrate";
    case StudyMode::Simulate: return "simulate";
    case StudyMode::Historical: return "historical";
  }
  return "?";
}

StudyMode parse_mode(const std::string& s) {
  if (s == "illustrate") return StudyMode::Illustrate;
  if (s == "simulate") return StudyMode::Simulate;
  if (s == "historical") return StudyMode::Historical;
  fail(ErrorCode::ParseError, "unknown mode '" + s + "'");
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::DataMissing, "cannot write " + path.string());
  out << text;
}

// Runs body(i) for i in [0, n) on `jobs` threads; results must be stored by
// index so the outcome does not depend on scheduling.
template <class F>
void parallel_for(int n, int jobs, F body) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

Scores score(const ForwardProblem& in, const ForwardProblem* out, const Eigen::VectorXd& x,
             double s, const ReferenceMeasure& reference) {
  Scores r;
  const ReferenceMeasure oce{Entropic{s}};
  auto zi = loss_of(in, x);
  r.entropic_in = evaluate(oce, zi);
  r.spec_in = evaluate(reference, zi);
  if (out) {
    auto zo = loss_of(*out, x);
    r.entropic_out = evaluate(oce, zo);
    r.spec_out = evaluate(reference, zo);
  }
  return r;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (assets < 1) fail(ErrorCode::InvalidArgument, "asset count must be positive");
  if (in_sample < 1 || out_sample < 0) fail(ErrorCode::InvalidArgument, "windows must be positive");
  if (count < 0) fail(ErrorCode::InvalidArgument, "experiment count must be nonnegative");
  if (s_grid.empty()) fail(ErrorCode::InvalidArgument, "s-grid is empty");
  for (double s : s_grid)
    if (!(s > 0) || !std::isfinite(s)) fail(ErrorCode::ParameterOutOfRange, "s values must be positive");
  if (!(lambda >= 0 && lambda <= 1)) fail(ErrorCode::ParameterOutOfRange, "lambda must lie in [0, 1]");
  if (alpha < 0 || alpha >= 1) fail(ErrorCode::ParameterOutOfRange, "alpha must lie in [0, 1)");
  if (lift_cap < 1) fail(ErrorCode::InvalidArgument, "lift cap must be positive");
  if (jobs < 1) fail(ErrorCode::InvalidArgument, "jobs must be positive");
  if (mode == StudyMode::Historical && data_path.empty())
    fail(ErrorCode::DataMissing, "historical mode needs a returns CSV");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (!j.is_object()) fail(ErrorCode::ParseError, "config must be an object");
  try {
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("assets")) c.assets = j.at("assets").get<int>();
    if (j.contains("in_sample")) c.in_sample = j.at("in_sample").get<int>();
    if (j.contains("out_sample")) c.out_sample = j.at("out_sample").get<int>();
    if (j.contains("count")) c.count = j.at("count").get<int>();
    if (j.contains("s_grid")) c.s_grid = j.at("s_grid").get<std::vector<double>>();
    if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
    if (j.contains("alpha")) c.alpha = rational_from_json(j.at("alpha"));
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("data")) c.data_path = j.at("data").get<std::string>();
    if (j.contains("lift_cap")) c.lift_cap = j.at("lift_cap").get<std::int64_t>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("config: ") + e.what());
  }
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {{"mode", mode_name(c.mode)},   {"assets", c.assets},
          {"in_sample", c.in_sample},    {"out_sample", c.out_sample},
          {"count", c.count},            {"s_grid", c.s_grid},
          {"lambda", c.lambda},          {"alpha", rational_to_json(c.alpha)},
          {"seed", c.seed},              {"data", c.data_path},
          {"lift_cap", c.lift_cap}};
}

ReferenceMeasure client_reference(const ExperimentConfig& c) {
  return mix_to_spectral(c.lambda, c.alpha);
}

SingleRun run_single(const WindowData& w, double s, const ReferenceMeasure& reference,
                     std::int64_t lift_cap, const Eigen::VectorXd* x_spec) {
  SingleRun r;
  r.s = s;
  auto in = ForwardProblem::portfolio(merge_duplicate_rows(w.in_sample));
  std::optional<ForwardProblem> out;
  if (w.out_sample.rows() > 0) out = ForwardProblem::portfolio(merge_duplicate_rows(w.out_sample));

  r.x[SpecPortfolio] = x_spec ? *x_spec : solve_forward(in, reference).x;
  r.x[EntropicPortfolio] = solve_forward_entropic(in, s).x;

  InverseInstance inst{
      {Observation{ForwardProblem::portfolio(merge_duplicate_rows(w.in_sample)),
                   r.x[EntropicPortfolio]}},
      reference,
      {},
      Family::LawInvCvxMeasure,
      {}};
  inst.options.lift_cap = lift_cap;
  auto imputed = solve_reduced(inst);
  r.deviation = imputed.deviation;
  r.vertex_deviation = (imputed.deltas - imputed.reference_values).cwiseAbs().maxCoeff();
  r.imputed = imputed.function;
  auto ic = solve_forward(in, imputed.function);
  r.x[ImputedPortfolio] = ic.x;
  r.imputed_objective = ic.objective;

  for (int k = 0; k < 3; ++k) r.scores[k] = score(in, out ? &*out : nullptr, r.x[k], s, reference);
  return r;
}

Eigen::MatrixXd nearest_correlation(const Eigen::MatrixXd& a, int max_iter, double tol) {
  const auto n = a.rows();
  if (a.cols() != n) fail(ErrorCode::DimensionMismatch, "correlation target must be square");
  auto psd = [](const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return Eigen::MatrixXd(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
  };
  Eigen::MatrixXd y = 0.5 * (a + a.transpose()), ds = Eigen::MatrixXd::Zero(n, n), x = y;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::MatrixXd r = y - ds;
    x = psd(r);
    ds = x - r;
    Eigen::MatrixXd prev = y;
    y = x;
    y.diagonal().setOnes();
    if ((y - prev).norm() <= tol * std::max(1.0, y.norm()) && (y - x).norm() <= 1e-10) break;
  }
  // Clip once more and rescale to a unit diagonal; both keep the matrix PSD.
  x = psd(0.5 * (y + y.transpose()));
  Eigen::VectorXd d = x.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  x = d.asDiagonal() * x * d.asDiagonal();
  x.diagonal().setOnes();
  return 0.5 * (x + x.transpose());
}

SimulatedModel simulate_model(std::uint64_t seed, int assets) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  SimulatedModel m;
  m.mean.resize(assets);
  for (int i = 0; i < assets; ++i) m.mean[i] = 0.1 * normal(rng);
  Eigen::MatrixXd target = Eigen::MatrixXd::Identity(assets, assets);
  for (int i = 0; i < assets; ++i)
    for (int j = i + 1; j < assets; ++j) target(i, j) = target(j, i) = unif(rng);
  m.covariance = 0.01 * nearest_correlation(target);
  return m;
}

Eigen::MatrixXd sample_returns(const SimulatedModel& m, std::uint64_t seed, int days) {
  const auto n = m.mean.size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.covariance);
  Eigen::MatrixXd root =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd out(days, n);
  Eigen::VectorXd z(n);
  for (int d = 0; d < days; ++d) {
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
    out.row(d) = (m.mean + root * z).transpose();
  }
  return out;
}

Eigen::MatrixXd simulate_returns(std::uint64_t seed, int assets, int days) {
  return sample_returns(simulate_model(experiment_seed(seed, 0), assets),
                        experiment_seed(seed, 1), days);
}

std::uint64_t experiment_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  os << "portfolio";
  for (double s : s_grid) os << ",s=" << fmt(s);
  os << "\n";
  for (int k = 0; k < 3; ++k) {
    os << kPortfolioNames[k];
    for (double v : cells[k]) os << "," << fmt(v);
    os << "\n";
  }
  return os.str();
}

const ResultTable& StudyResult::table(const std::string& measure, bool in_sample) const {
  for (const auto& t : tables)
    if (t.measure == measure && t.in_sample == in_sample) return t;
  fail(ErrorCode::InvalidArgument, "no table " + measure);
}

nlohmann::json StudyResult::summary() const {
  nlohmann::json cols = nlohmann::json::array();
  const auto& oce = table("oce", true);
  const auto& spec = table("spec", true);
  // One basis point, in percentage points.
  const double slack = 0.01;
  for (std::size_t c = 0; c < oce.s_grid.size(); ++c) {
    auto o = [&](int k) { return oce.cells[k][c]; };
    auto p = [&](int k) { return spec.cells[k][c]; };
    bool oce_order = o(EntropicPortfolio) <= o(ImputedPortfolio) + slack &&
                     o(ImputedPortfolio) <= o(SpecPortfolio) + slack;
    bool spec_order = p(SpecPortfolio) <= p(ImputedPortfolio) + slack &&
                      p(ImputedPortfolio) <= p(EntropicPortfolio) + slack;
    cols.push_back({{"s", oce.s_grid[c]},
                    {"included", included[c]},
                    {"failures", failures[c]},
                    {"ordering_fraction", ordering_fraction[c]},
                    {"average_entropic_ordering", oce_order},
                    {"average_reference_ordering", spec_order}});
  }
  return {{"columns", cols}, {"failure_log", failure_log}};
}

std::vector<WindowData> study_windows(const ExperimentConfig& c) {
  const int days = c.in_sample + c.out_sample;
  std::vector<WindowData> out(static_cast<std::size_t>(c.count));
  auto split = [&](const Eigen::MatrixXd& r) {
    return WindowData{r.topRows(c.in_sample), r.bottomRows(c.out_sample)};
  };
  if (c.mode == StudyMode::Historical) {
    Eigen::MatrixXd all = read_returns_csv(c.data_path);
    if (all.rows() < days || all.cols() < c.assets)
      fail(ErrorCode::DataMissing, "returns file has " + std::to_string(all.rows()) + " days and " +
                                       std::to_string(all.cols()) + " assets; need " +
                                       std::to_string(days) + " and " + std::to_string(c.assets));
    for (int e = 0; e < c.count; ++e) {
      std::mt19937_64 rng(experiment_seed(c.seed, static_cast<std::uint64_t>(e)));
      auto start = std::uniform_int_distribution<Eigen::Index>(0, all.rows() - days)(rng);
      std::vector<int> cols(static_cast<std::size_t>(all.cols()));
      std::iota(cols.begin(), cols.end(), 0);
      // Partial Fisher-Yates keeps the draw independent of the library's shuffle.
      for (int i = 0; i < c.assets; ++i) {
        auto j = std::uniform_int_distribution<int>(i, static_cast<int>(cols.size()) - 1)(rng);
        std::swap(cols[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
      }
      cols.resize(static_cast<std::size_t>(c.assets));
      std::sort(cols.begin(), cols.end());
      Eigen::MatrixXd w(days, c.assets);
      for (int k = 0; k < c.assets; ++k)
        w.col(k) = all.col(cols[static_cast<std::size_t>(k)]).segment(start, days);
      out[static_cast<std::size_t>(e)] = split(w);
    }
  } else {
    for (int e = 0; e < c.count; ++e)
      out[static_cast<std::size_t>(e)] =
          split(simulate_returns(experiment_seed(c.seed, static_cast<std::uint64_t>(e)), c.assets, days));
  }
  return out;
}

StudyResult run_study(const ExperimentConfig& c) {
  c.validate();
  if (c.mode == StudyMode::Illustrate)
    fail(ErrorCode::InvalidArgument, "the illustration is not a study; use illustrate");
  const auto windows = study_windows(c);
  const auto reference = client_reference(c);
  const int ns = static_cast<int>(c.s_grid.size());

  StudyResult r;
  r.runs.assign(windows.size(), std::vector<SingleRun>(static_cast<std::size_t>(ns)));
  std::vector<std::vector<std::string>> errors(windows.size(),
                                               std::vector<std::string>(static_cast<std::size_t>(ns)));
  parallel_for(static_cast<int>(windows.size()), c.jobs, [&](int e) {
    const auto& w = windows[static_cast<std::size_t>(e)];
    auto& row = r.runs[static_cast<std::size_t>(e)];
    auto& err = errors[static_cast<std::size_t>(e)];
    Eigen::VectorXd x_spec;
    try {
      x_spec = solve_forward(ForwardProblem::portfolio(merge_duplicate_rows(w.in_sample)), reference).x;
    } catch (const std::exception& ex) {
      for (auto& m : err) m = ex.what();
      return;
    }
    for (int k = 0; k < ns; ++k) {
      try {
        row[static_cast<std::size_t>(k)] =
            run_single(w, c.s_grid[static_cast<std::size_t>(k)], reference, c.lift_cap, &x_spec);
      } catch (const std::exception& ex) {
        err[static_cast<std::size_t>(k)] = ex.what();
      }
    }
  });

  r.included.assign(static_cast<std::size_t>(ns), 0);
  r.failures.assign(static_cast<std::size_t>(ns), 0);
  r.ordering_fraction.assign(static_cast<std::size_t>(ns), 0.0);
  const std::array<std::pair<const char*, bool>, 4> kinds{
      {{"oce", true}, {"spec", true}, {"oce", false}, {"spec", false}}};
  for (auto [m, ins] : kinds) {
    ResultTable t{m, ins, c.s_grid, {}};
    for (auto& cells : t.cells) cells.assign(static_cast<std::size_t>(ns), 0.0);
    r.tables.push_back(t);
  }
  for (std::size_t e = 0; e < windows.size(); ++e) {
    for (std::size_t k = 0; k < static_cast<std::size_t>(ns); ++k) {
      if (!errors[e][k].empty()) {
        ++r.failures[k];
        r.failure_log.push_back("experiment " + std::to_string(e) + ", s=" + fmt(c.s_grid[k]) +
                                ": " + errors[e][k]);
        r.runs[e][k] = SingleRun{};
        continue;
      }
      const auto& run = r.runs[e][k];
      ++r.included[k];
      for (int p = 0; p < 3; ++p) {
        const auto& sc = run.scores[static_cast<std::size_t>(p)];
        r.tables[0].cells[p][k] += sc.entropic_in;
        r.tables[1].cells[p][k] += sc.spec_in;
        r.tables[2].cells[p][k] += sc.entropic_out;
        r.tables[3].cells[p][k] += sc.spec_out;
      }
      const auto& sc = run.scores;
      if (sc[EntropicPortfolio].entropic_in <= sc[ImputedPortfolio].entropic_in + 1e-9 &&
          sc[ImputedPortfolio].entropic_in <= sc[SpecPortfolio].entropic_in + 1e-9)
        r.ordering_fraction[k] += 1.0;
    }
  }
  for (std::size_t k = 0; k < static_cast<std::size_t>(ns); ++k) {
    const double n = std::max(1, r.included[k]);
    for (auto& t : r.tables)
      for (auto& cells : t.cells) cells[k] *= 100.0 / n;
    r.ordering_fraction[k] /= n;
  }
  return r;
}

void write_study(const ExperimentConfig& c, const StudyResult& r) {
  std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  for (const auto& t : r.tables)
    write_file(dir / ((t.in_sample ? "in_sample_" : "out_of_sample_") + t.measure + ".csv"),
               t.to_csv());
  auto s = r.summary();
  s["config"] = config_to_json(c);
  write_file(dir / "summary.json", s.dump(2) + "\n");
}

Eigen::MatrixXd illustration_returns() {
  Eigen::MatrixXd r(2, 2);
  r << 0.0325, 0.1370, -0.0755, -0.1712;
  return r;
}

IllustrationResult illustrate(const ExperimentConfig& c, int points, double half_width) {
  c.validate();
  if (points < 2) fail(ErrorCode::InvalidArgument, "grid needs at least two points");
  const auto reference = client_reference(c);
  IllustrationResult r;
  r.s_grid = c.s_grid;
  for (int i = 0; i < points; ++i)
    r.axis.push_back(-half_width + 2.0 * half_width * i / (points - 1));

  WindowData w{illustration_returns(), Eigen::MatrixXd()};
  auto space = OutcomeSpace::uniform(2);
  std::vector<DualPwlRiskFunction> functions;
  for (double s : c.s_grid) {
    r.runs.push_back(run_single(w, s, reference, c.lift_cap));
    functions.push_back(r.runs.back().imputed);
  }

  const auto cells = static_cast<std::size_t>(points) * static_cast<std::size_t>(points);
  r.values.assign(functions.size() + 1, std::vector<double>(cells));
  parallel_for(points, c.jobs, [&](int i) {
    for (int j = 0; j < points; ++j) {
      RandomLoss z(Eigen::Vector2d(r.axis[static_cast<std::size_t>(i)], r.axis[static_cast<std::size_t>(j)]),
                   space);
      const auto at = static_cast<std::size_t>(i) * static_cast<std::size_t>(points) +
                      static_cast<std::size_t>(j);
      r.values[0][at] = evaluate(reference, z);
      for (std::size_t k = 0; k < functions.size(); ++k) r.values[k + 1][at] = evaluate(functions[k], z);
    }
  });
  return r;
}

std::string IllustrationResult::to_csv() const {
  std::ostringstream os;
  os << "z1,z2,reference";
  for (double s : s_grid) os << ",imputed_s=" << fmt(s);
  os << "\n";
  const auto n = axis.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      os << fmt(axis[i]) << "," << fmt(axis[j]);
      for (const auto& v : values) os << "," << fmt(v[i * n + j]);
      os << "\n";
    }
  return os.str();
}

nlohmann::json IllustrationResult::summary() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& run : runs) {
    rows.push_back({{"s", run.s},
                    {"x_Spec", vector_to_json(run.x[SpecPortfolio])},
                    {"x_OCE", vector_to_json(run.x[EntropicPortfolio])},
                    {"x_IC", vector_to_json(run.x[ImputedPortfolio])},
                    {"deviation", run.deviation},
                    {"vertex_deviation", run.vertex_deviation},
                    {"imputed_objective", run.imputed_objective}});
  }
  return {{"runs", rows}};
}

void write_illustration(const ExperimentConfig& c, const IllustrationResult& r) {
  std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "illustration_grid.csv", r.to_csv());
  write_file(dir / "illustration_summary.json", r.summary().dump(2) + "\n");
}

}  // namespace invrisk
