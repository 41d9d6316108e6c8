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
#pragma once

// Observables built on top of the engines: M_F, the four two-time series,
// TRS norms and the H -> -H audit.

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dissim/dense.hpp"
#include "dissim/model.hpp"
#include "dissim/permsym.hpp"

namespace dissim::analysis {

using cd = std::complex<double>;

enum class Engine { Dense, Permsym, FloquetDense, FloquetPermsym, MeanField };

std::string_view to_string(Engine e);
// Throws ArgumentError for an unknown name.
Engine parse_engine(std::string_view name);
inline bool is_floquet(Engine e) { return e == Engine::FloquetDense || e == Engine::FloquetPermsym; }

inline constexpr double kCorrelationWindow = 10.0;
inline constexpr int kCorrelationPoints = 100;

/// linspace(0, 10, 100)
std::vector<double> canonical_grid();
/// Each canonical time rounded to the nearest multiple of tau.
std::vector<double> stroboscopic_grid(double tau);

/// M_F = <(S^x)^2> / N^2, diagonal i = j terms included.
double order_parameter(const dense::DenseState& state);
double order_parameter(const permsym::PermState& state, const permsym::PermBasis& basis);

struct CorrelationSet {
  std::vector<double> t_grid;
  std::vector<double> c_xy, c_yx, chi_xy, chi_yx;
  bool plateau_subtracted = false;
};

/// Builds C = (2/N) Re and chi = (2/N) Im of <S^x(t) S^y(0)> and <S^y(t) S^x(0)>,
/// then subtracts the last-time value from both C series.
CorrelationSet correlation_set(int n_spins, std::span<const double> t_grid, std::span<const cd> xy,
                               std::span<const cd> yx, bool subtract_plateau = true);

/// Idempotent; chi is never touched.
void subtract_plateau(CorrelationSet& set);

struct TrsDiagnostics {
  std::optional<double> norm_c;    // absent when |C_xy| = 0
  std::optional<double> norm_chi;  // absent when |chi_xy| = 0
};

TrsDiagnostics trs_norms(const CorrelationSet& set);

/// Reporting label only: "TRS*-like", "TRS-like" or "".
std::string trs_label(const TrsDiagnostics& d);

// One point of a phase diagram. gamma sets gamma_e = gamma_d = gamma, or
// p = gamma * tau for the Floquet engines.
struct CellSpec {
  Engine engine = Engine::Dense;
  model::ModelSpec model;
  double gamma = 0.0;
  double tau = 0.0;
};

struct CellOptions {
  bool correlations = true;
  double horizon = 100.0;  // dense evolution fallback; 20 in fast mode
  dense::EvolveOptions evolve{};
};

struct CellOutcome {
  double m_f = 0.0;
  TrsDiagnostics trs;
  std::optional<CorrelationSet> correlations;
  bool converged = false;
  std::string error;  // empty unless the solver failed
  double p = 0.0;     // Floquet reset probability, 0 for continuous engines
};

/// Never throws for solver failures; they land in CellOutcome::error.
CellOutcome evaluate_cell(const CellSpec& cell, const CellOptions& opts = {});

struct AuditCheck {
  std::string name;
  double mismatch = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  bool passed() const;
  std::string describe() const;
};

/// Runs H and -H and compares M_F (equal), <S^y> (negated), C_xy (negated)
/// and chi_xy (equal). Engine must be dense, permsym or one of the Floquet engines.
AuditReport h_sign_audit(const model::ModelSpec& model, const model::DissipationSpec& dissipation, Engine engine,
                         double tolerance = 1e-8);

}  // namespace dissim::analysis
