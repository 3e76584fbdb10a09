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

// Independent reference computations used by the tests. None of these call
// into the solver code paths they are compared against.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// min_t t + E[(Z - t)_+] / (1 - alpha); the minimum sits at a support point.
inline double cvar_ru(double alpha, const std::vector<double>& z, const std::vector<double>& p) {
  double best = std::numeric_limits<double>::infinity();
  for (double t : z) {
    double v = t;
    for (std::size_t i = 0; i < z.size(); ++i) v += p[i] * std::max(0.0, z[i] - t) / (1.0 - alpha);
    best = std::min(best, v);
  }
  return best;
}

// Expected loss over the worst (1 - alpha) of the probability mass, filled
// greedily from the largest outcome down.
inline double cvar_greedy_tail(double alpha, const std::vector<double>& z,
                               const std::vector<double>& p) {
  std::vector<std::size_t> idx(z.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });
  double mass = 1.0 - alpha, v = 0.0;
  for (std::size_t i : idx) {
    double take = std::min(p[i], mass);
    v += take * z[i];
    mass -= take;
    if (mass <= 0.0) break;
  }
  return v / (1.0 - alpha);
}

// Stepwise spectrum: weights on ascending order statistics of M equally
// likely outcomes, by numerical integration of the step function.
inline std::vector<double> spectrum_weights(const std::vector<double>& levels,
                                            const std::vector<double>& breaks, int m) {
  std::vector<double> w(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double lo = static_cast<double>(i) / m, hi = static_cast<double>(i + 1) / m;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      double a = std::max(lo, breaks[k]), b = std::min(hi, breaks[k + 1]);
      if (b > a) w[i] += (b - a) * levels[k];
    }
  }
  return w;
}

inline double sorted_dot(std::vector<double> z, const std::vector<double>& w) {
  std::sort(z.begin(), z.end());
  double v = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) v += w[i] * z[i];
  return v;
}

// Golden-section search of a unimodal function on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a, double b,
                         int iters = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d);
    }
  }
  return f((a + b) / 2);
}

// inf_t t + E[(exp(s (Z - t)) - 1) / s] by 1-D search.
inline double entropic_oce(double s, const std::vector<double>& z, const std::vector<double>& p) {
  double lo = *std::min_element(z.begin(), z.end()) - 1.0;
  double hi = *std::max_element(z.begin(), z.end()) + 1.0;
  return golden_min(
      [&](double t) {
        double v = t;
        for (std::size_t i = 0; i < z.size(); ++i) v += p[i] * (std::exp(s * (z[i] - t)) - 1.0) / s;
        return v;
      },
      lo, hi);
}

// Best point of f over the two-dimensional simplex on a grid.
struct GridResult {
  double a = 0.0;
  double value = 0.0;
};
inline GridResult grid_simplex2(const std::function<double(double)>& f, double step) {
  GridResult best{0.0, f(0.0)};
  const int n = static_cast<int>(std::llround(1.0 / step));
  for (int k = 1; k <= n; ++k) {
    double a = static_cast<double>(k) / n;
    double v = f(a);
    if (v < best.value) best = {a, v};
  }
  return best;
}

// min over simplex vertices of c'x.
inline double simplex_vertex_min(const Eigen::VectorXd& c) { return c.minCoeff(); }

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

// Random point of the unit simplex (normalized exponentials).
inline Eigen::VectorXd random_simplex_point(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = e(rng);
  return v / v.sum();
}

}  // namespace oracle
