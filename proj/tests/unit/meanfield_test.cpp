// Copyright 2026 The dissim Authors
//
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
#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "dissim/error.hpp"
#include "dissim/meanfield.hpp"
#include "dissim/permsym.hpp"
#include "support/oracles.hpp"

namespace dissim {
namespace {

using meanfield::cumulant_correlator;
using meanfield::phase_boundary;

TEST(MeanField, CorrelatorExamples) {
  EXPECT_NEAR(cumulant_correlator(0.5, 0.5, 0.5).xx_correlator, 0.375, 1e-15);
  EXPECT_NEAR(cumulant_correlator(0.5, 1.0, 1.0).xx_correlator, 0.0, 1e-15);
  EXPECT_NEAR(cumulant_correlator(0.5, 1e-9, 1e-9).xx_correlator, 0.5, 1e-8);
  EXPECT_NEAR(cumulant_correlator(0.5, 0.0, 0.0).xx_correlator, 0.5, 1e-15);
  EXPECT_EQ(cumulant_correlator(0.5, 1.0, 1.0).mf_order, 0.0);
}

TEST(MeanField, BoundaryExamples) {
  EXPECT_EQ(*phase_boundary(0.5), 2.0);
  EXPECT_EQ(*phase_boundary(0.0), 0.0);
  EXPECT_EQ(*phase_boundary(1.0), 0.0);
  EXPECT_FALSE(phase_boundary(1.2).has_value());
  EXPECT_FALSE(phase_boundary(-0.1).has_value());
  EXPECT_NEAR(*phase_boundary(0.25, 2.0), 4.0 * std::sqrt(0.25 * 1.75), 1e-15);
}

TEST(MeanField, RejectsSingularInputs) {
  EXPECT_THROW(cumulant_correlator(0.0, 1.0, 1.0), ArgumentError);
  EXPECT_THROW(cumulant_correlator(0.5, 1.0, 1.0, 0.0), ArgumentError);
  EXPECT_THROW(cumulant_correlator(0.5, -1.0, 1.0), ArgumentError);
  EXPECT_THROW(cumulant_correlator(0.5, NAN, 1.0), ArgumentError);
}

TEST(MeanFieldProperty, BoundsAndClipping) {
  testing::Gen gen(41);
  for (int draw = 0; draw < 500; ++draw) {
    const double j = gen.uniform(0.2, 3.0), delta = gen.uniform(0.01, 2.0) * (gen.integer(0, 1) ? 1 : -1);
    const double ge = gen.uniform(0.0, 3.0), gd = gen.uniform(0.0, 3.0);
    const auto r = cumulant_correlator(delta, ge, gd, j);
    const double ratio = ge + gd == 0.0 ? 0.5 : ge / (ge + gd);
    EXPECT_LE(r.xx_correlator, ratio * 4.0 * delta * (j - delta) / (j * j) + 1e-12);
    EXPECT_GE(r.mf_order, 0.0);
    EXPECT_EQ(r.mf_order, std::max(r.xx_correlator, 0.0));
    EXPECT_EQ(r.ferromagnetic, r.xx_correlator > 0.0);
  }
}

TEST(MeanFieldProperty, SignChangeSitsOnTheBoundary) {
  testing::Gen gen(42);
  for (int draw = 0; draw < 200; ++draw) {
    const double j = gen.uniform(0.5, 2.0), g = gen.uniform(0.05, 2.0 * j * 0.99);
    const double ge = g * gen.uniform(0.1, 0.9), gd = g - ge;
    // Boundary field below j/2 from inverting g = 4 sqrt(delta (j - delta)).
    const double root = 0.5 * (j - std::sqrt(j * j - g * g / 4.0));
    ASSERT_NEAR(*phase_boundary(root, j), g, 1e-12);
    // Bisection on the correlator alone.
    double lo = 1e-9, hi = 0.5 * j;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cumulant_correlator(mid, ge, gd, j).xx_correlator > 0.0 ? hi : lo) = mid;
    }
    EXPECT_NEAR(0.5 * (lo + hi), root, 1e-12);
  }
}

TEST(MeanField, BoundaryHasNoCouplingRangeArgument) {
  static_assert(std::is_invocable_r_v<std::optional<double>, decltype(&phase_boundary), double, double>);
  static_assert(!std::is_invocable_v<decltype(&phase_boundary), double, double, double>);
}

// Product-state mean-field Bloch equations, integrated to steady state. The
// ordered branch shares the magnetization and the phase with the cumulant result.
std::array<double, 3> bloch_steady_state(double delta, double ge, double gd, double j) {
  const double gamma_t = 0.5 * (ge + gd);
  auto rhs = [&](const std::array<double, 3>& s) -> std::array<double, 3> {
    const auto [x, y, z] = s;
    return {2.0 * delta * y - gamma_t * x, -2.0 * j * x * z - 2.0 * delta * x - gamma_t * y,
            2.0 * j * x * y - ge * (z + 1.0)};
  };
  std::array<double, 3> s{0.3, 0.0, -0.5};
  const double h = 0.01;
  for (int step = 0; step < 400000; ++step) {
    auto add = [](std::array<double, 3> a, const std::array<double, 3>& b, double c) {
      for (int i = 0; i < 3; ++i) a[i] += c * b[i];
      return a;
    };
    const auto k1 = rhs(s), k2 = rhs(add(s, k1, h / 2)), k3 = rhs(add(s, k2, h / 2)), k4 = rhs(add(s, k3, h));
    for (int i = 0; i < 3; ++i) s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return s;
}

TEST(MeanField, AgreesWithProductStateBlochEquations) {
  for (auto [delta, g] : {std::pair{0.5, 0.5}, std::pair{0.3, 0.4}, std::pair{0.5, 1.6}, std::pair{0.5, 2.6},
                          std::pair{0.2, 1.8}, std::pair{0.8, 0.3}}) {
    const auto r = cumulant_correlator(delta, g, g);
    const auto s = bloch_steady_state(delta, g, g, 1.0);
    EXPECT_EQ(std::abs(s[0]) > 1e-4, r.ferromagnetic) << delta << " " << g;
    if (r.ferromagnetic) EXPECT_NEAR(s[2], r.z, 1e-6);
  }
}

TEST(MeanField, ProductStateAmplitudeIsHalfTheCorrelator) {
  for (auto [delta, g] : {std::pair{0.5, 0.5}, std::pair{0.3, 0.4}, std::pair{0.8, 0.3}}) {
    const auto r = cumulant_correlator(delta, g, g);
    const auto s = bloch_steady_state(delta, g, g, 1.0);
    EXPECT_NEAR(s[0] * s[0], 0.5 * r.xx_correlator, 1e-6) << delta << " " << g;
  }
}

// Disabled: at (0.5, 0.5) the gap grows, 0.171 / 0.192 / 0.195 for N = 25 / 50 / 100,
// because M_F - 1/N drifts toward the product-state value, mf_order / 2.
TEST(MeanField, DISABLED_PermsymApproachesPredictionWithSize) {
  double previous = 1.0;
  const double prediction = cumulant_correlator(0.5, 0.5, 0.5).mf_order;
  for (int n : {25, 50, 100}) {
    const permsym::PermBasis basis(n);
    model::ModelSpec spec;
    spec.n_spins = n;
    spec.delta = 0.5;
    const auto ss = permsym::steady_state_perm(permsym::build_liouvillian_perm(spec, {0.5, 0.5}, basis), basis);
    const double gap = std::abs(permsym::order_parameter(ss.state, basis) - prediction);
    EXPECT_LT(gap, previous) << n;
    previous = gap;
  }
}

}  // namespace
}  // namespace dissim
