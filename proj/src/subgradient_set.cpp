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

#include <cmath>

#include "invrisk/backend.hpp"

namespace invrisk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

int SubgradientSet::dim() const {
  return std::visit(
      overloaded{
          [](const FullSimplex& s) { return s.dim; },
          [](const Singleton& s) { return static_cast<int>(s.point.size()); },
          [](const CVaRBox& s) { return static_cast<int>(s.weights.size()); },
          [](const MADSet& s) { return static_cast<int>(s.weights.size()); },
          [](const SemidevSOC& s) { return static_cast<int>(s.weights.size()); },
          [](const TransportationPolytope& s) { return static_cast<int>(s.weights.size()); },
          [](const Polyhedron& s) {
            return static_cast<int>(std::max(s.A.cols(), s.E.cols()));
          },
          [](const MinkowskiMix& s) { return s.parts.empty() ? 0 : s.parts[0].dim(); },
      },
      set);
}

std::string SubgradientSet::kind() const {
  return std::visit(overloaded{
                        [](const FullSimplex&) { return "simplex"; },
                        [](const Singleton&) { return "singleton"; },
                        [](const CVaRBox&) { return "cvar_box"; },
                        [](const MADSet&) { return "mad"; },
                        [](const SemidevSOC&) { return "semidev"; },
                        [](const TransportationPolytope&) { return "transportation"; },
                        [](const Polyhedron&) { return "polyhedron"; },
                        [](const MinkowskiMix&) { return "mix"; },
                    },
                    set);
}

bool SubgradientSet::sums_to_one() const {
  return std::visit(overloaded{
                        [](const Singleton& s) { return std::abs(s.point.sum() - 1.0) < 1e-12; },
                        [](const Polyhedron&) { return false; },
                        [](const MinkowskiMix& s) {
                          for (const auto& p : s.parts)
                            if (!p.sums_to_one()) return false;
                          return true;
                        },
                        [](const auto&) { return true; },
                    },
                    set);
}

bool SubgradientSet::needs_cone() const {
  return std::visit(overloaded{
                        [](const SemidevSOC&) { return true; },
                        [](const MinkowskiMix& s) {
                          for (const auto& p : s.parts)
                            if (p.needs_cone()) return true;
                          return false;
                        },
                        [](const auto&) { return false; },
                    },
                    set);
}

namespace {

LinearExpr sum_of(const std::vector<Var>& y) {
  LinearExpr e;
  for (const auto& v : y) e.add(v, 1.0);
  return e;
}

void check_weights(const std::vector<Rational>& w, std::size_t n) {
  if (w.size() != n) fail(ErrorCode::DimensionMismatch, "set dimension differs from variables");
}

// q_o = w_o (1 + gamma (h_o - w'h)) for the deviation-type sets.
void deviation_rows(Program& p, const std::vector<Var>& y, const std::vector<Var>& h,
                    const std::vector<Rational>& w, double gamma) {
  for (std::size_t o = 0; o < y.size(); ++o) {
    double wo = to_double(w[o]);
    LinearExpr e(y[o]);
    e.add(h[o], -gamma * wo);
    for (std::size_t k = 0; k < h.size(); ++k) e.add(h[k], gamma * wo * to_double(w[k]));
    p.add_row(e, Sense::Equal, wo);
  }
}

}  // namespace

void embed_set(Program& p, const std::vector<Var>& y, const SubgradientSet& c) {
  if (static_cast<int>(y.size()) != c.dim())
    fail(ErrorCode::DimensionMismatch, "set dimension differs from variables");
  const int n = static_cast<int>(y.size());
  std::visit(
      overloaded{
          [&](const FullSimplex&) { p.add_row(sum_of(y), Sense::Equal, 1.0); },
          [&](const Singleton& s) {
            for (int o = 0; o < n; ++o) p.add_row(LinearExpr(y[o]), Sense::Equal, s.point[o]);
          },
          [&](const CVaRBox& s) {
            check_weights(s.weights, y.size());
            Rational scale = Rational(1) / (Rational(1) - s.alpha);
            for (int o = 0; o < n; ++o)
              p.add_row(LinearExpr(y[o]), Sense::LessEqual, to_double(s.weights[o] * scale));
            p.add_row(sum_of(y), Sense::Equal, 1.0);
          },
          [&](const MADSet& s) {
            check_weights(s.weights, y.size());
            auto h = p.add_vars("mad_h", n, -1.0, 1.0);
            deviation_rows(p, y, h, s.weights, s.gamma);
          },
          [&](const SemidevSOC& s) {
            check_weights(s.weights, y.size());
            auto h = p.add_vars("sd_h", n, 0.0, kInf);
            deviation_rows(p, y, h, s.weights, s.gamma);
            auto u = p.add_vars("sd_u", n);
            for (int o = 0; o < n; ++o) {
              LinearExpr e(u[o]);
              e.add(h[o], -std::sqrt(to_double(s.weights[o])));
              p.add_row(e, Sense::Equal, 0.0);
            }
            Var t = p.add_var("sd_t", 1.0, 1.0);
            p.add_cone(t, u);
          },
          [&](const TransportationPolytope& s) {
            check_weights(s.weights, y.size());
            const int k = static_cast<int>(s.levels.size());
            if (static_cast<int>(s.level_masses.size()) != k)
              fail(ErrorCode::DimensionMismatch, "level masses differ from levels");
            std::vector<std::vector<Var>> q(static_cast<std::size_t>(n));
            for (int o = 0; o < n; ++o)
              q[o] = p.add_vars("tp_q" + std::to_string(o), k, 0.0, kInf);
            for (int o = 0; o < n; ++o) {
              p.add_row(sum_of(q[o]), Sense::Equal, to_double(s.weights[o]));
              LinearExpr e(y[o]);
              for (int l = 0; l < k; ++l) e.add(q[o][l], -s.levels[l]);
              p.add_row(e, Sense::Equal, 0.0);
            }
            // The last column sum is implied by the others.
            for (int l = 0; l + 1 < k; ++l) {
              LinearExpr e;
              for (int o = 0; o < n; ++o) e.add(q[o][l], 1.0);
              p.add_row(e, Sense::Equal, to_double(s.level_masses[l]));
            }
          },
          [&](const Polyhedron& s) {
            for (Eigen::Index r = 0; r < s.A.rows(); ++r) {
              LinearExpr e;
              for (int o = 0; o < n; ++o) e.add(y[o], s.A(r, o));
              p.add_row(e, Sense::LessEqual, s.b[r]);
            }
            for (Eigen::Index r = 0; r < s.E.rows(); ++r) {
              LinearExpr e;
              for (int o = 0; o < n; ++o) e.add(y[o], s.E(r, o));
              p.add_row(e, Sense::Equal, s.f[r]);
            }
          },
          [&](const MinkowskiMix& s) {
            if (s.lambdas.size() != s.parts.size())
              fail(ErrorCode::DimensionMismatch, "mix weights differ from parts");
            std::vector<LinearExpr> acc(static_cast<std::size_t>(n));
            for (std::size_t c = 0; c < s.parts.size(); ++c) {
              auto qc = p.add_vars("mix" + std::to_string(c), n, 0.0, kInf);
              embed_set(p, qc, s.parts[c]);
              for (int o = 0; o < n; ++o) acc[o].add(qc[o], s.lambdas[c]);
            }
            for (int o = 0; o < n; ++o) {
              LinearExpr e(y[o]);
              e.add(acc[o], -1.0);
              p.add_row(e, Sense::Equal, 0.0);
            }
          },
      },
      c.set);
}

}  // namespace invrisk
