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

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include "invrisk/errors.hpp"

namespace boost {
// Boost 1.74's mixed rational/integer operator== recurses forever under
// C++20 reversed-operator lookup; exact non-template overloads win.
inline bool operator==(const rational<std::int64_t>& a, int b) {
  return a.denominator() == 1 && a.numerator() == b;
}
inline bool operator==(const rational<std::int64_t>& a, std::int64_t b) {
  return a.denominator() == 1 && a.numerator() == b;
}
}  // namespace boost

namespace invrisk {

using Rational = boost::rational<std::int64_t>;

double to_double(const Rational& r);
// Parses "n/d", "n" or a short decimal such as "0.9".
Rational parse_rational(const std::string& text);
std::string rational_to_string(const Rational& r);

/// Finite outcome space with exact rational weights.
class OutcomeSpace {
 public:
  explicit OutcomeSpace(std::vector<Rational> weights);
  static std::shared_ptr<const OutcomeSpace> uniform(int size);

  int size() const { return static_cast<int>(weights_.size()); }
  const std::vector<Rational>& weights() const { return weights_; }
  Eigen::VectorXd weights_as_double() const;
  bool is_uniform() const { return uniform_; }
  bool same_as(const OutcomeSpace& other) const;

 private:
  std::vector<Rational> weights_;
  bool uniform_ = false;
};

using SpacePtr = std::shared_ptr<const OutcomeSpace>;

/// Finite distribution: strictly ascending support, positive rational
/// probabilities summing to one. Duplicate support values are merged.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;
  // Accepts unsorted input with repeated values; sorts and merges.
  DiscreteDistribution(const std::vector<double>& values,
                       const std::vector<Rational>& probs);

  static DiscreteDistribution dirac(double value);

  int size() const { return static_cast<int>(support_.size()); }
  const Eigen::VectorXd& support() const { return support_; }
  const std::vector<Rational>& probs() const { return probs_; }
  Eigen::VectorXd probs_as_double() const;
  double mean() const;
  // Least common multiple of the probability denominators.
  std::int64_t common_denominator() const;

  bool operator==(const DiscreteDistribution& other) const;
  bool approx_equal(const DiscreteDistribution& other, double tol) const;

 private:
  Eigen::VectorXd support_;
  std::vector<Rational> probs_;
};

/// A loss vector indexed by the outcomes of a space.
class RandomLoss {
 public:
  RandomLoss(Eigen::VectorXd values, SpacePtr space);

  int size() const { return static_cast<int>(values_.size()); }
  const Eigen::VectorXd& values() const { return values_; }
  const SpacePtr& space() const { return space_; }

 private:
  Eigen::VectorXd values_;
  SpacePtr space_;
};

/// Finitely supported random vector; scenarios are the rows of `scenarios`.
class ScenarioMap {
 public:
  ScenarioMap(Eigen::MatrixXd scenarios, std::vector<Rational> probs);
  static ScenarioMap uniform(const Eigen::MatrixXd& scenarios);

  int size() const { return static_cast<int>(scenarios_.rows()); }
  const Eigen::MatrixXd& scenarios() const { return scenarios_; }
  const std::vector<Rational>& probs() const { return probs_; }
  SpacePtr space() const { return space_; }

 private:
  Eigen::MatrixXd scenarios_;
  std::vector<Rational> probs_;
  SpacePtr space_;
};

// Merges identical rows of an equally weighted sample into a ScenarioMap.
ScenarioMap merge_duplicate_rows(const Eigen::MatrixXd& rows);

RandomLoss uniform_lift(const DiscreteDistribution& d, std::int64_t cap);
DiscreteDistribution distribution_of(const RandomLoss& z);
// Same as distribution_of for a vector paired with explicit weights.
DiscreteDistribution distribution_of(const Eigen::VectorXd& values,
                                     const std::vector<Rational>& weights);
Eigen::VectorXd replicate(const Eigen::VectorXd& y,
                          const DiscreteDistribution& d, std::int64_t m);

struct SortResult {
  Eigen::VectorXd sorted;
  std::vector<int> order;  // sorted[k] = values[order[k]], 0-based
};
SortResult sort_with_order(const RandomLoss& z);
SortResult sort_with_order(const Eigen::VectorXd& z);

bool equal_in_distribution(const RandomLoss& a, const RandomLoss& b,
                           double tol);

}  // namespace invrisk
