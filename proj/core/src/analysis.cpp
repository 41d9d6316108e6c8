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
#include "dissim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dissim/error.hpp"
#include "dissim/meanfield.hpp"

namespace dissim::analysis {

namespace {

using dense::Axis;

struct EngineRun {
  double m_f = 0.0;
  cd s_y = 0.0;
  std::vector<double> grid;
  std::vector<cd> xy, yx;
  bool converged = false;
};

std::vector<int> periods_for(std::span<const double> grid, double tau) {
  std::vector<int> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(static_cast<int>(std::lround(t / tau)));
  return out;
}

EngineRun run_dense(const model::ModelSpec& spec, const model::DissipationSpec& diss, bool correlations,
                    const CellOptions& opts) {
  const auto h = dense::build_hamiltonian(spec, model::build_coupling_matrix(spec));
  const auto sx = dense::collective(spec.n_spins, Axis::X);
  const auto sy = dense::collective(spec.n_spins, Axis::Y);
  EngineRun run;
  if (diss.is_floquet()) {
    const auto& f = diss.floquet();
    const auto fs = dense::floquet_steady_state_dense(h, f.tau, f.p);
    run.m_f = analysis::order_parameter(fs.state);
    run.s_y = dense::expectation(sy, fs.state);
    run.converged = fs.info.converged;
    if (correlations) {
      run.grid = stroboscopic_grid(f.tau);
      const dense::FloquetMap map(h, f.tau, f.p);
      const auto periods = periods_for(run.grid, f.tau);
      run.xy = dense::two_time_correlation_floquet_dense(sx, sy, fs.state, map, periods);
      run.yx = dense::two_time_correlation_floquet_dense(sy, sx, fs.state, map, periods);
    }
    return run;
  }
  const auto l = dense::build_liouvillian(h, diss.continuous());
  dense::SteadyStateOptions sopts;
  sopts.evolve_horizon = opts.horizon;
  sopts.evolve = opts.evolve;
  const auto ss = dense::steady_state_dense(l, sopts);
  run.m_f = analysis::order_parameter(ss.state);
  run.s_y = dense::expectation(sy, ss.state);
  run.converged = ss.info.converged;
  if (correlations) {
    run.grid = canonical_grid();
    run.xy = dense::two_time_correlation_dense(sx, sy, ss.state, l, run.grid, opts.evolve);
    run.yx = dense::two_time_correlation_dense(sy, sx, ss.state, l, run.grid, opts.evolve);
  }
  return run;
}

EngineRun run_permsym(const model::ModelSpec& spec, const model::DissipationSpec& diss, bool correlations) {
  const permsym::PermBasis basis(spec.n_spins);
  const Eigen::VectorXd fy = permsym::collective_functional(basis, Axis::Y);
  EngineRun run;
  if (diss.is_floquet()) {
    spec.validate();
    if (spec.alpha != 0.0) throw UnsupportedError("permutation-symmetric engine requires alpha = 0");
    const auto& f = diss.floquet();
    const auto couplings = model::build_coupling_matrix(spec);
    const double j0 = spec.n_spins > 1 ? couplings.entries(0, 1) : 0.0;
    const permsym::FloquetOperator k(permsym::build_generator_perm(basis, spec.delta, j0, {}),
                                     permsym::floquet_map_perm(basis, f.p), f.tau);
    const auto fs = permsym::steady_state_floquet_perm(k, basis);
    run.m_f = analysis::order_parameter(fs.state, basis);
    run.s_y = permsym::expectation(fy, fs.state);
    run.converged = fs.info.converged;
    if (correlations) {
      run.grid = stroboscopic_grid(f.tau);
      run.xy = permsym::two_time_correlation_floquet_perm(Axis::X, Axis::Y, fs.state, k, basis, run.grid);
      run.yx = permsym::two_time_correlation_floquet_perm(Axis::Y, Axis::X, fs.state, k, basis, run.grid);
    }
    return run;
  }
  const auto l = permsym::build_liouvillian_perm(spec, diss.continuous(), basis);
  const auto ss = permsym::steady_state_perm(l, basis);
  run.m_f = analysis::order_parameter(ss.state, basis);
  run.s_y = permsym::expectation(fy, ss.state);
  run.converged = ss.info.converged;
  if (correlations) {
    run.grid = canonical_grid();
    run.xy = permsym::two_time_correlation_perm(Axis::X, Axis::Y, ss.state, l, basis, run.grid);
    run.yx = permsym::two_time_correlation_perm(Axis::Y, Axis::X, ss.state, l, basis, run.grid);
  }
  return run;
}

EngineRun run_engine(const model::ModelSpec& spec, const model::DissipationSpec& diss, Engine engine,
                     bool correlations, const CellOptions& opts) {
  diss.validate();
  if (is_floquet(engine) != diss.is_floquet())
    throw ArgumentError(std::string("dissipation mode does not fit engine ") + std::string(to_string(engine)));
  switch (engine) {
    case Engine::Dense:
    case Engine::FloquetDense: return run_dense(spec, diss, correlations, opts);
    case Engine::Permsym:
    case Engine::FloquetPermsym: return run_permsym(spec, diss, correlations);
    case Engine::MeanField: break;
  }
  throw ArgumentError("the mean-field engine has no state to run");
}

double max_abs(std::span<const double> a, std::span<const double> b, double sign) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] + sign * b[k]));
  return m;
}

}  // namespace

std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::Dense: return "dense";
    case Engine::Permsym: return "permsym";
    case Engine::FloquetDense: return "floquet-dense";
    case Engine::FloquetPermsym: return "floquet-permsym";
    case Engine::MeanField: return "meanfield";
  }
  return "unknown";
}

Engine parse_engine(std::string_view name) {
  for (Engine e : {Engine::Dense, Engine::Permsym, Engine::FloquetDense, Engine::FloquetPermsym, Engine::MeanField})
    if (to_string(e) == name) return e;
  throw ArgumentError("unknown engine '" + std::string(name) + "'");
}

std::vector<double> canonical_grid() {
  std::vector<double> grid(kCorrelationPoints);
  for (int k = 0; k < kCorrelationPoints; ++k) grid[k] = kCorrelationWindow * k / (kCorrelationPoints - 1);
  return grid;
}

std::vector<double> stroboscopic_grid(double tau) {
  if (!(tau > 0.0)) throw ArgumentError("tau must be positive");
  std::vector<double> grid = canonical_grid();
  for (double& t : grid) t = static_cast<double>(std::lround(t / tau)) * tau;
  return grid;
}

double order_parameter(const dense::DenseState& state) {
  const auto sx = dense::collective(state.n_spins, Axis::X);
  const dense::DenseOperator sx2{state.n_spins, dense::SparseOp(sx.matrix * sx.matrix)};
  const double n = state.n_spins;
  return dense::expectation(sx2, state).real() / (n * n);
}

double order_parameter(const permsym::PermState& state, const permsym::PermBasis& basis) {
  return permsym::order_parameter(state, basis);
}

CorrelationSet correlation_set(int n_spins, std::span<const double> t_grid, std::span<const cd> xy,
                               std::span<const cd> yx, bool subtract) {
  if (n_spins < 1) throw ArgumentError("n_spins must be positive");
  if (xy.size() != t_grid.size() || yx.size() != t_grid.size() || t_grid.empty())
    throw ArgumentError("correlation series and time grid have mismatched lengths");
  CorrelationSet set;
  set.t_grid.assign(t_grid.begin(), t_grid.end());
  const double scale = 2.0 / n_spins;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    set.c_xy.push_back(scale * xy[k].real());
    set.chi_xy.push_back(scale * xy[k].imag());
    set.c_yx.push_back(scale * yx[k].real());
    set.chi_yx.push_back(scale * yx[k].imag());
  }
  if (subtract) subtract_plateau(set);
  return set;
}

void subtract_plateau(CorrelationSet& set) {
  for (auto* c : {&set.c_xy, &set.c_yx}) {
    if (c->empty()) continue;
    const double plateau = c->back();
    for (double& v : *c) v -= plateau;
  }
  set.plateau_subtracted = true;
}

TrsDiagnostics trs_norms(const CorrelationSet& set) {
  auto ratio = [](const std::vector<double>& a, const std::vector<double>& b) -> std::optional<double> {
    if (a.size() != b.size()) throw ArgumentError("correlation series have mismatched lengths");
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      num += (a[k] - b[k]) * (a[k] - b[k]);
      den += a[k] * a[k];
    }
    if (den == 0.0) return std::nullopt;
    return std::sqrt(num / den);
  };
  return {ratio(set.c_xy, set.c_yx), ratio(set.chi_xy, set.chi_yx)};
}

std::string trs_label(const TrsDiagnostics& d) {
  if (d.norm_c && *d.norm_c < 0.5) return "TRS*-like";
  if (d.norm_c && d.norm_chi && std::abs(*d.norm_c - 2.0) < 0.5 && std::abs(*d.norm_chi - 2.0) < 0.5)
    return "TRS-like";
  return "";
}

CellOutcome evaluate_cell(const CellSpec& cell, const CellOptions& opts) {
  CellOutcome out;
  try {
    if (cell.engine == Engine::MeanField) {
      const auto mf = meanfield::cumulant_correlator(cell.model.delta, cell.gamma, cell.gamma);
      out.m_f = mf.mf_order;
      out.converged = true;
      return out;
    }
    model::DissipationSpec diss;
    if (is_floquet(cell.engine)) {
      out.p = model::floquet_rate_map(cell.gamma, cell.tau);
      diss.mode = model::Floquet{cell.tau, out.p};
    } else {
      diss.mode = model::Continuous{cell.gamma, cell.gamma};
    }
    const EngineRun run = run_engine(cell.model, diss, cell.engine, opts.correlations, opts);
    out.m_f = run.m_f;
    out.converged = run.converged;
    if (opts.correlations) {
      out.correlations = correlation_set(cell.model.n_spins, run.grid, run.xy, run.yx);
      out.trs = trs_norms(*out.correlations);
    }
  } catch (const std::exception& e) {
    out.converged = false;
    out.error = e.what();
  }
  return out;
}

bool AuditReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.passed; });
}

std::string AuditReport::describe() const {
  std::ostringstream os;
  for (const auto& c : checks)
    os << (c.passed ? "ok    " : "FAILED") << "  " << c.name << ": mismatch " << c.mismatch << " (tolerance "
       << c.tolerance << ")\n";
  return os.str();
}

AuditReport h_sign_audit(const model::ModelSpec& model, const model::DissipationSpec& dissipation, Engine engine,
                         double tolerance) {
  if (engine == Engine::MeanField) throw ArgumentError("the H -> -H audit needs a state-based engine");
  const CellOptions opts;
  const EngineRun plus = run_engine(model, dissipation, engine, true, opts);
  const EngineRun minus = run_engine(model.sign_flipped(), dissipation, engine, true, opts);
  const auto a = correlation_set(model.n_spins, plus.grid, plus.xy, plus.yx);
  const auto b = correlation_set(model.n_spins, minus.grid, minus.xy, minus.yx);

  AuditReport report;
  auto add = [&](std::string name, double mismatch) {
    report.checks.push_back({std::move(name), mismatch, tolerance, mismatch <= tolerance});
  };
  add("M_F equal", std::abs(plus.m_f - minus.m_f));
  add("<S^y> negated", std::abs(plus.s_y + minus.s_y));
  add("C_xy negated", max_abs(a.c_xy, b.c_xy, 1.0));
  add("chi_xy equal", max_abs(a.chi_xy, b.chi_xy, -1.0));
  return report;
}

}  // namespace dissim::analysis
