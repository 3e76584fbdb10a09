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

#include "invrisk/probspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace invrisk {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::IncompatibleM: return "IncompatibleM";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::UnsupportedMeasure: return "UnsupportedMeasure";
    case ErrorCode::UnsupportedSet: return "UnsupportedSet";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::DataMissing: return "DataMissing";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) /
         static_cast<double>(r.denominator());
}

Rational parse_rational(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      std::int64_t num = std::stoll(s.substr(0, slash));
      std::int64_t den = std::stoll(s.substr(slash + 1));
      if (den == 0) fail(ErrorCode::ParseError, "zero denominator in " + text);
      return Rational(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
      size_t pos = 0;
      std::int64_t v = std::stoll(s, &pos);
      if (pos != s.size()) fail(ErrorCode::ParseError, "bad rational " + text);
      return Rational(v);
    }
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t decimals = s.size() - dot - 1;
    if (decimals > 15) fail(ErrorCode::ParseError, "too many decimals " + text);
    size_t pos = 0;
    std::int64_t num = std::stoll(digits, &pos);
    if (pos != digits.size()) fail(ErrorCode::ParseError, "bad rational " + text);
    std::int64_t den = 1;
    for (std::size_t i = 0; i < decimals; ++i) den *= 10;
    return Rational(num, den);
  } catch (const std::logic_error&) {
    fail(ErrorCode::ParseError, "bad rational " + text);
  }
}

std::string rational_to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator() << "/" << r.denominator();
  return os.str();
}

namespace {

void check_weights(const std::vector<Rational>& w, const char* what) {
  if (w.empty()) fail(ErrorCode::InvalidArgument, std::string(what) + " is empty");
  Rational total(0);
  for (const auto& x : w) {
    if (x <= 0) fail(ErrorCode::InvalidArgument, std::string(what) + " has a non-positive weight");
    total += x;
  }
  if (total != 1) fail(ErrorCode::InvalidArgument, std::string(what) + " weights do not sum to 1");
}

Eigen::VectorXd as_double(const std::vector<Rational>& w) {
  Eigen::VectorXd out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = to_double(w[i]);
  return out;
}

}  // namespace

OutcomeSpace::OutcomeSpace(std::vector<Rational> weights)
    : weights_(std::move(weights)) {
  check_weights(weights_, "outcome space");
  Rational u(1, static_cast<std::int64_t>(weights_.size()));
  uniform_ = std::all_of(weights_.begin(), weights_.end(),
                         [&](const Rational& w) { return w == u; });
}

std::shared_ptr<const OutcomeSpace> OutcomeSpace::uniform(int size) {
  if (size <= 0) fail(ErrorCode::InvalidArgument, "space size must be positive");
  return std::make_shared<const OutcomeSpace>(
      std::vector<Rational>(size, Rational(1, size)));
}

Eigen::VectorXd OutcomeSpace::weights_as_double() const { return as_double(weights_); }

bool OutcomeSpace::same_as(const OutcomeSpace& other) const {
  return weights_ == other.weights_;
}

DiscreteDistribution::DiscreteDistribution(const std::vector<double>& values,
                                           const std::vector<Rational>& probs) {
  if (values.size() != probs.size())
    fail(ErrorCode::DimensionMismatch, "support and probabilities differ in length");
  check_weights(probs, "distribution");
  std::map<double, Rational> merged;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) fail(ErrorCode::InvalidArgument, "non-finite support value");
    double v = values[i] == 0.0 ? 0.0 : values[i];  // fold -0 into +0
    merged[v] += probs[i];
  }
  support_.resize(static_cast<Eigen::Index>(merged.size()));
  Eigen::Index k = 0;
  for (const auto& [v, p] : merged) {
    support_[k++] = v;
    probs_.push_back(p);
  }
}

DiscreteDistribution DiscreteDistribution::dirac(double value) {
  return DiscreteDistribution({value}, {Rational(1)});
}

Eigen::VectorXd DiscreteDistribution::probs_as_double() const { return as_double(probs_); }

double DiscreteDistribution::mean() const {
  return probs_as_double().dot(support_);
}

std::int64_t DiscreteDistribution::common_denominator() const {
  std::int64_t l = 1;
  for (const auto& p : probs_) {
    std::int64_t d = p.denominator();
    std::int64_t g = std::gcd(l, d);
    if (l / g > std::numeric_limits<std::int64_t>::max() / d)
      return std::numeric_limits<std::int64_t>::max();
    l = l / g * d;
  }
  return l;
}

bool DiscreteDistribution::operator==(const DiscreteDistribution& other) const {
  return probs_ == other.probs_ && support_ == other.support_;
}

namespace {

// Merges support values that lie within tol of their left neighbour.
std::pair<std::vector<double>, std::vector<Rational>> cluster(
    const DiscreteDistribution& d, double tol) {
  std::vector<double> v;
  std::vector<Rational> p;
  for (int i = 0; i < d.size(); ++i) {
    if (!v.empty() && d.support()[i] - v.back() <= tol) {
      p.back() += d.probs()[i];
    } else {
      v.push_back(d.support()[i]);
      p.push_back(d.probs()[i]);
    }
  }
  return {v, p};
}

}  // namespace

bool DiscreteDistribution::approx_equal(const DiscreteDistribution& other,
                                        double tol) const {
  auto [va, pa] = cluster(*this, tol);
  auto [vb, pb] = cluster(other, tol);
  if (pa != pb) return false;
  for (std::size_t i = 0; i < va.size(); ++i)
    if (std::abs(va[i] - vb[i]) > tol) return false;
  return true;
}

RandomLoss::RandomLoss(Eigen::VectorXd values, SpacePtr space)
    : values_(std::move(values)), space_(std::move(space)) {
  if (!space_) fail(ErrorCode::InvalidArgument, "loss without outcome space");
  if (values_.size() != space_->size())
    fail(ErrorCode::DimensionMismatch, "loss length differs from space size");
  if (!values_.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite loss value");
}

ScenarioMap::ScenarioMap(Eigen::MatrixXd scenarios, std::vector<Rational> probs)
    : scenarios_(std::move(scenarios)), probs_(std::move(probs)) {
  if (static_cast<std::size_t>(scenarios_.rows()) != probs_.size())
    fail(ErrorCode::DimensionMismatch, "scenario count differs from probabilities");
  if (!scenarios_.allFinite()) fail(ErrorCode::InvalidArgument, "non-finite scenario");
  for (Eigen::Index i = 0; i < scenarios_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < scenarios_.rows(); ++j)
      if (scenarios_.row(i) == scenarios_.row(j))
        fail(ErrorCode::InvalidArgument, "duplicate scenario vectors");
  space_ = std::make_shared<const OutcomeSpace>(probs_);
}

ScenarioMap ScenarioMap::uniform(const Eigen::MatrixXd& scenarios) {
  auto n = static_cast<std::int64_t>(scenarios.rows());
  if (n == 0) fail(ErrorCode::InvalidArgument, "no scenarios");
  return ScenarioMap(scenarios, std::vector<Rational>(n, Rational(1, n)));
}

ScenarioMap merge_duplicate_rows(const Eigen::MatrixXd& rows) {
  auto n = static_cast<std::int64_t>(rows.rows());
  if (n == 0) fail(ErrorCode::InvalidArgument, "no scenarios");
  std::vector<Eigen::Index> keep;
  std::vector<std::int64_t> count;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    bool found = false;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      if (rows.row(keep[k]) == rows.row(i)) {
        ++count[k];
        found = true;
        break;
      }
    }
    if (!found) {
      keep.push_back(i);
      count.push_back(1);
    }
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(keep.size()), rows.cols());
  std::vector<Rational> probs;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = rows.row(keep[k]);
    probs.emplace_back(count[k], n);
  }
  return ScenarioMap(out, probs);
}

RandomLoss uniform_lift(const DiscreteDistribution& d, std::int64_t cap) {
  std::int64_t m = d.common_denominator();
  if (m > cap)
    fail(ErrorCode::CapExceeded, "uniform lift needs " + std::to_string(m) +
                                     " outcomes, cap is " + std::to_string(cap));
  Eigen::VectorXd values(m);
  Eigen::Index k = 0;
  for (int o = 0; o < d.size(); ++o) {
    Rational c = d.probs()[o] * m;
    for (std::int64_t r = 0; r < c.numerator(); ++r) values[k++] = d.support()[o];
  }
  return RandomLoss(values, OutcomeSpace::uniform(static_cast<int>(m)));
}

DiscreteDistribution distribution_of(const Eigen::VectorXd& values,
                                     const std::vector<Rational>& weights) {
  return DiscreteDistribution(
      std::vector<double>(values.data(), values.data() + values.size()), weights);
}

DiscreteDistribution distribution_of(const RandomLoss& z) {
  return distribution_of(z.values(), z.space()->weights());
}

Eigen::VectorXd replicate(const Eigen::VectorXd& y, const DiscreteDistribution& d,
                          std::int64_t m) {
  if (y.size() != d.size()) fail(ErrorCode::DimensionMismatch, "replicate: length mismatch");
  Eigen::VectorXd out(m);
  Eigen::Index k = 0;
  for (int o = 0; o < d.size(); ++o) {
    Rational c = d.probs()[o] * m;
    if (c.denominator() != 1)
      fail(ErrorCode::IncompatibleM, "probability " + rational_to_string(d.probs()[o]) +
                                         " is not a multiple of 1/" + std::to_string(m));
    for (std::int64_t r = 0; r < c.numerator(); ++r) out[k++] = y[o];
  }
  return out;
}

SortResult sort_with_order(const Eigen::VectorXd& z) {
  SortResult r;
  r.order.resize(static_cast<std::size_t>(z.size()));
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](int a, int b) { return z[a] < z[b]; });
  r.sorted.resize(z.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) r.sorted[k] = z[r.order[k]];
  return r;
}

SortResult sort_with_order(const RandomLoss& z) { return sort_with_order(z.values()); }

bool equal_in_distribution(const RandomLoss& a, const RandomLoss& b, double tol) {
  return distribution_of(a).approx_equal(distribution_of(b), tol);
}

}  // namespace invrisk
