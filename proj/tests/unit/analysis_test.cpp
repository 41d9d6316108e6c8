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

#include <cmath>

#include "dissim/analysis.hpp"
#include "dissim/error.hpp"
#include "dissim/meanfield.hpp"
#include "support/oracles.hpp"

namespace dissim {
namespace {

using analysis::CorrelationSet;
using analysis::Engine;
using Eigen::MatrixXcd;
using testing::cd;

model::ModelSpec chain(int n, double alpha, double delta) {
  model::ModelSpec s;
  s.n_spins = n;
  s.alpha = alpha;
  s.delta = delta;
  return s;
}

MatrixXcd x_polarized(int n) {
  Eigen::VectorXcd plus = Eigen::VectorXcd::Constant(2, 1.0 / std::sqrt(2.0));
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
  for (int i = 0; i < n; ++i) psi = Eigen::kroneckerProduct(plus, psi).eval();
  return psi * psi.adjoint();
}

CorrelationSet series(std::vector<double> c_xy, std::vector<double> c_yx, std::vector<double> chi_xy,
                      std::vector<double> chi_yx) {
  CorrelationSet s;
  for (std::size_t k = 0; k < c_xy.size(); ++k) s.t_grid.push_back(static_cast<double>(k));
  s.c_xy = std::move(c_xy);
  s.c_yx = std::move(c_yx);
  s.chi_xy = std::move(chi_xy);
  s.chi_yx = std::move(chi_yx);
  return s;
}

TEST(Engines, NamesRoundTrip) {
  for (auto e : {Engine::Dense, Engine::Permsym, Engine::FloquetDense, Engine::FloquetPermsym, Engine::MeanField})
    EXPECT_EQ(analysis::parse_engine(analysis::to_string(e)), e);
  EXPECT_EQ(analysis::parse_engine("floquet-permsym"), Engine::FloquetPermsym);
  EXPECT_THROW(analysis::parse_engine("mps"), ArgumentError);
  EXPECT_TRUE(analysis::is_floquet(Engine::FloquetDense));
  EXPECT_FALSE(analysis::is_floquet(Engine::Permsym));
}

TEST(Grids, CanonicalAndStroboscopic) {
  const auto g = analysis::canonical_grid();
  ASSERT_EQ(g.size(), 100u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 10.0);
  EXPECT_NEAR(g[1], 10.0 / 99.0, 1e-15);
  for (double tau : {0.1, 0.5, 0.3}) {
    const auto s = analysis::stroboscopic_grid(tau);
    ASSERT_EQ(s.size(), 100u);
    for (std::size_t k = 0; k < s.size(); ++k) {
      EXPECT_LE(std::abs(s[k] - g[k]), 0.5 * tau + 1e-12);
      EXPECT_NEAR(s[k] / tau, std::round(s[k] / tau), 1e-9);
      if (k) EXPECT_GE(s[k], s[k - 1]);
    }
  }
}

TEST(OrderParameter, MaximallyMixedAndPolarized) {
  for (int n : {1, 3, 5}) {
    EXPECT_NEAR(analysis::order_parameter(dense::DenseState::maximally_mixed(n)), 1.0 / n, 1e-14);
    EXPECT_NEAR(analysis::order_parameter(dense::DenseState{n, x_polarized(n)}), 1.0, 1e-13);
    const permsym::PermBasis basis(n);
    const permsym::PermState mixed{n, permsym::project(MatrixXcd::Identity(1 << n, 1 << n) / double(1 << n), basis)};
    EXPECT_NEAR(analysis::order_parameter(mixed, basis), 1.0 / n, 1e-14);
    const permsym::PermState polarized{n, permsym::project(x_polarized(n), basis)};
    EXPECT_NEAR(analysis::order_parameter(polarized, basis), 1.0, 1e-13);
  }
}

TEST(CorrelationSet, PumpedSingleSpin) {
  const auto h = dense::build_hamiltonian(chain(1, 0.0, 0.4), model::build_coupling_matrix(chain(1, 0.0, 0.4)));
  const auto l = dense::build_liouvillian(h, {1.0, 1.0});
  const auto rho = dense::DenseState::all_pumped(1);
  const double grid[] = {0.0, 1.0, 2.0};
  const auto xy = dense::two_time_correlation_dense(dense::collective(1, dense::Axis::X),
                                                    dense::collective(1, dense::Axis::Y), rho, l, grid);
  const auto yx = dense::two_time_correlation_dense(dense::collective(1, dense::Axis::Y),
                                                    dense::collective(1, dense::Axis::X), rho, l, grid);
  const auto set = analysis::correlation_set(1, grid, xy, yx, false);
  EXPECT_NEAR(set.chi_xy[0], -2.0, 1e-14);
  EXPECT_NEAR(set.c_xy[0], 0.0, 1e-14);
  EXPECT_NEAR(set.chi_yx[0], 2.0, 1e-14);
}

TEST(CorrelationSetProperty, ZeroDelaySusceptibilityIsMagnetization) {
  testing::Gen gen(51);
  for (int draw = 0; draw < 6; ++draw) {
    const int n = gen.integer(2, 4);
    const auto spec = chain(n, gen.uniform(0.0, 2.0), gen.uniform(0.1, 1.5));
    const double g = gen.uniform(0.2, 1.5);
    const auto h = dense::build_hamiltonian(spec, model::build_coupling_matrix(spec));
    const auto l = dense::build_liouvillian(h, {g, g});
    const auto ss = dense::steady_state_dense(l).state;
    const double grid[] = {0.0, 1.0};
    const auto sx = dense::collective(n, dense::Axis::X), sy = dense::collective(n, dense::Axis::Y);
    const auto set = analysis::correlation_set(n, grid, dense::two_time_correlation_dense(sx, sy, ss, l, grid),
                                               dense::two_time_correlation_dense(sy, sx, ss, l, grid));
    const double sz = dense::expectation(dense::collective(n, dense::Axis::Z), ss).real();
    EXPECT_NEAR(set.chi_xy[0], 2.0 * sz / n, 1e-8);
    EXPECT_NEAR(set.chi_yx[0], -2.0 * sz / n, 1e-8);
    EXPECT_TRUE(set.plateau_subtracted);
    EXPECT_EQ(set.c_xy.back(), 0.0);
  }
}

TEST(CorrelationSet, RejectsMismatchedLengths) {
  const double grid[] = {0.0, 1.0};
  const std::vector<cd> one{cd(1.0)}, two{cd(1.0), cd(2.0)};
  EXPECT_THROW(analysis::correlation_set(2, grid, one, two), ArgumentError);
  EXPECT_THROW(analysis::correlation_set(0, grid, two, two), ArgumentError);
}

TEST(Plateau, SubtractionIsIdempotentAndLeavesChiAlone) {
  auto s = series({3.0, 2.0, 1.5}, {1.0, 0.5, 0.25}, {0.1, 0.2, 0.3}, {-0.1, -0.2, -0.3});
  analysis::subtract_plateau(s);
  const auto once = s;
  analysis::subtract_plateau(s);
  EXPECT_EQ(s.c_xy, once.c_xy);
  EXPECT_EQ(s.c_yx, once.c_yx);
  EXPECT_EQ(s.c_xy, (std::vector<double>{1.5, 0.5, 0.0}));
  EXPECT_EQ(s.chi_xy, (std::vector<double>{0.1, 0.2, 0.3}));
}

TEST(TrsNorms, DefinitionExamples) {
  const auto trs = analysis::trs_norms(series({1.0, -2.0}, {1.0, -2.0}, {0.5, 0.1}, {-0.5, -0.1}));
  EXPECT_EQ(*trs.norm_c, 0.0);
  EXPECT_EQ(*trs.norm_chi, 2.0);
  EXPECT_EQ(analysis::trs_label(trs), "TRS*-like");

  const auto flipped = analysis::trs_norms(series({1.0, 3.0}, {-1.0, -3.0}, {0.5, 0.1}, {-0.5, -0.1}));
  EXPECT_EQ(*flipped.norm_c, 2.0);
  EXPECT_EQ(analysis::trs_label(flipped), "TRS-like");

  const auto zero = analysis::trs_norms(series({0.0, 0.0}, {1.0, 2.0}, {0.0, 0.0}, {1.0, 1.0}));
  EXPECT_FALSE(zero.norm_c.has_value());
  EXPECT_FALSE(zero.norm_chi.has_value());
  EXPECT_EQ(analysis::trs_label(zero), "");
}

TEST(TrsNormsProperty, NonNegativeAndScaleInvariant) {
  testing::Gen gen(52);
  for (int draw = 0; draw < 200; ++draw) {
    std::vector<double> a(10), b(10), c(10), d(10);
    for (int k = 0; k < 10; ++k) {
      a[k] = gen.normal();
      b[k] = gen.normal();
      c[k] = gen.normal();
      d[k] = gen.normal();
    }
    const auto t = analysis::trs_norms(series(a, b, c, d));
    EXPECT_GE(*t.norm_c, 0.0);
    EXPECT_GE(*t.norm_chi, 0.0);
    const double s = gen.uniform(0.1, 10.0);
    for (auto* v : {&a, &b, &c, &d})
      for (double& x : *v) x *= s;
    const auto u = analysis::trs_norms(series(a, b, c, d));
    EXPECT_NEAR(*u.norm_c, *t.norm_c, 1e-12 * (1.0 + *t.norm_c));
    EXPECT_NEAR(*u.norm_chi, *t.norm_chi, 1e-12 * (1.0 + *t.norm_chi));
  }
}

TEST(HSignAuditProperty, DenseContinuousDraws) {
  testing::Gen gen(53);
  for (int draw = 0; draw < 4; ++draw) {
    const auto spec = chain(4, gen.uniform(0.0, 2.0), gen.uniform(0.1, 1.5));
    const double g = gen.uniform(0.2, 1.5);
    const auto report = analysis::h_sign_audit(spec, {model::Continuous{g, g}}, Engine::Dense);
    EXPECT_TRUE(report.passed()) << report.describe();
    EXPECT_EQ(report.checks.size(), 4u);
  }
}

TEST(HSignAudit, NearlyClosedTwoSpins) {
  const auto report = analysis::h_sign_audit(chain(2, 0.0, 0.7), {model::Continuous{1e-3, 1e-3}}, Engine::Dense);
  EXPECT_TRUE(report.passed()) << report.describe();
}

TEST(HSignAudit, FloquetDenseAndPermsym) {
  const auto spec = chain(4, 0.0, 0.6);
  const model::DissipationSpec diss{model::Floquet{0.3, 0.2}};
  for (auto e : {Engine::FloquetDense, Engine::FloquetPermsym}) {
    const auto report = analysis::h_sign_audit(spec, diss, e);
    EXPECT_TRUE(report.passed()) << report.describe();
  }
  const auto cont = analysis::h_sign_audit(spec, {model::Continuous{0.5, 0.5}}, Engine::Permsym);
  EXPECT_TRUE(cont.passed()) << cont.describe();
  EXPECT_THROW(analysis::h_sign_audit(spec, diss, Engine::MeanField), ArgumentError);
}

TEST(HSignAudit, ReportDescribesEveryCheck) {
  analysis::AuditReport r;
  EXPECT_FALSE(r.passed());
  r.checks.push_back({"M_F equal", 0.0, 1e-8, true});
  r.checks.push_back({"chi_xy equal", 1.0, 1e-8, false});
  EXPECT_FALSE(r.passed());
  const auto text = r.describe();
  EXPECT_NE(text.find("FAILED  chi_xy equal"), std::string::npos);
  EXPECT_NE(text.find("ok      M_F equal"), std::string::npos);
}

TEST(EvaluateCell, MeanFieldMatchesClosedForm) {
  analysis::CellSpec cell{Engine::MeanField, chain(50, 0.0, 0.5), 0.5, 0.0};
  const auto out = analysis::evaluate_cell(cell);
  EXPECT_TRUE(out.converged);
  EXPECT_EQ(out.m_f, meanfield::cumulant_correlator(0.5, 0.5, 0.5).mf_order);
  cell.model.delta = 0.0;
  const auto bad = analysis::evaluate_cell(cell);
  EXPECT_FALSE(bad.converged);
  EXPECT_FALSE(bad.error.empty());
}

TEST(EvaluateCell, DenseAndPermsymAgree) {
  const analysis::CellSpec d{Engine::Dense, chain(4, 0.0, 0.5), 0.7, 0.0};
  const analysis::CellSpec p{Engine::Permsym, chain(4, 0.0, 0.5), 0.7, 0.0};
  const auto a = analysis::evaluate_cell(d), b = analysis::evaluate_cell(p);
  ASSERT_TRUE(a.converged) << a.error;
  ASSERT_TRUE(b.converged) << b.error;
  EXPECT_NEAR(a.m_f, b.m_f, 1e-9);
  EXPECT_NEAR(*a.trs.norm_c, *b.trs.norm_c, 1e-6);
  EXPECT_NEAR(*a.trs.norm_chi, *b.trs.norm_chi, 1e-6);
  EXPECT_EQ(a.correlations->t_grid.size(), 100u);
}

TEST(EvaluateCell, FloquetUsesRateMap) {
  const analysis::CellSpec cell{Engine::FloquetPermsym, chain(6, 0.0, 0.5), 1.0, 0.1};
  analysis::CellOptions opts;
  opts.correlations = false;
  const auto out = analysis::evaluate_cell(cell, opts);
  EXPECT_TRUE(out.converged) << out.error;
  EXPECT_DOUBLE_EQ(out.p, 0.1);
  EXPECT_FALSE(out.correlations.has_value());
}

TEST(EvaluateCell, FailuresBecomeErrorTags) {
  const analysis::CellSpec cell{Engine::Permsym, chain(4, 1.0, 0.5), 0.7, 0.0};
  const auto out = analysis::evaluate_cell(cell);
  EXPECT_FALSE(out.converged);
  EXPECT_NE(out.error.find("alpha"), std::string::npos);
}

}  // namespace
}  // namespace dissim
