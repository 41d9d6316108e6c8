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
// Acceptance gate. Prints one PASS/FAIL line per criterion; exit status is
// non-zero when any selected criterion fails.
//
//   dissim_acceptance                 all criteria
//   dissim_acceptance --only finite-size,protocols
//   dissim_acceptance --list

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dissim/analysis.hpp"
#include "dissim/dense.hpp"
#include "dissim/meanfield.hpp"
#include "dissim/permsym.hpp"
#include "dissim/sweep.hpp"

namespace {

using namespace dissim;
using dense::Axis;
using Eigen::MatrixXcd;
using cd = std::complex<double>;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string key;
  std::function<Verdict()> run;
};

model::ModelSpec chain(int n, double alpha, double delta) {
  model::ModelSpec s;
  s.n_spins = n;
  s.alpha = alpha;
  s.delta = delta;
  return s;
}

dense::DenseOperator hamiltonian(const model::ModelSpec& s) {
  return dense::build_hamiltonian(s, model::build_coupling_matrix(s));
}

double max_abs(const std::vector<cd>& a, const std::vector<cd>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// permsym vs dense for N <= 6, alpha = 0.
Verdict oracle_equivalence() {
  std::mt19937_64 rng(20260101);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  double ss_err = 0, floquet_err = 0, fss_err = 0, left_err = 0, series_err = 0;
  for (int draw = 0; draw < 20; ++draw) {
    const int n = 1 + draw % 6;
    const double delta = uniform(0.1, 1.5), gamma = uniform(0.2, 1.5);
    const double tau = uniform(0.05, 1.0), p = uniform(0.05, 1.0);
    const auto spec = chain(n, 0.0, delta);
    const permsym::PermBasis basis(n);
    const auto j0 = model::build_coupling_matrix(spec).entries;
    const double j = n > 1 ? j0(0, 1) : 0.0;

    const auto lp = permsym::build_liouvillian_perm(spec, {gamma, gamma}, basis);
    const auto sp = permsym::steady_state_perm(lp, basis);
    const auto h = hamiltonian(spec);
    const auto ld = dense::build_liouvillian(h, {gamma, gamma});
    const auto sd = dense::steady_state_dense(ld);
    ss_err = std::max(ss_err, (permsym::to_dense(sp.state, basis).rho - sd.state.rho).cwiseAbs().maxCoeff());

    // Floquet propagator applied to a random symmetric operator.
    const auto k = permsym::floquet_propagator_perm(permsym::build_generator_perm(basis, delta, j, {0.0, 0.0}),
                                                    permsym::floquet_map_perm(basis, p), tau);
    Eigen::VectorXcd v(basis.size());
    for (auto& c : v) c = cd(uniform(-1, 1), uniform(-1, 1));
    MatrixXcd x = MatrixXcd::Zero(1 << n, 1 << n);
    for (Eigen::Index i = 0; i < basis.size(); ++i) x += v(i) * permsym::embed_basis_element(basis, i);
    Eigen::VectorXcd kv;
    k.apply(v, kv);
    const auto step = dense::floquet_step_dense(dense::DenseState{n, x}, h, tau, p);
    floquet_err = std::max(floquet_err, (kv - permsym::project(step.rho, basis)).cwiseAbs().maxCoeff());

    const auto fp = permsym::steady_state_floquet_perm(k, basis);
    const auto fd = dense::floquet_steady_state_dense(h, tau, p);
    fss_err = std::max(fss_err, (permsym::to_dense(fp.state, basis).rho - fd.state.rho).cwiseAbs().maxCoeff());

    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
      const Eigen::VectorXcd mv = permsym::left_multiplier_perm(a, basis).matrix * v;
      const MatrixXcd sx = dense::collective(n, a).to_dense() * x;
      left_err = std::max(left_err, (mv - permsym::project(sx, basis)).cwiseAbs().maxCoeff());
    }

    const auto grid = analysis::canonical_grid();
    const auto sgrid = analysis::stroboscopic_grid(tau);
    std::vector<int> periods;
    for (double t : sgrid) periods.push_back(static_cast<int>(std::lround(t / tau)));
    const dense::FloquetMap map(h, tau, p);
    for (auto [a, b] : {std::pair{Axis::X, Axis::Y}, std::pair{Axis::Y, Axis::X}}) {
      const auto ca = dense::collective(n, a), cb = dense::collective(n, b);
      series_err = std::max(series_err, max_abs(permsym::two_time_correlation_perm(a, b, sp.state, lp, basis, grid),
                                                dense::two_time_correlation_dense(ca, cb, sd.state, ld, grid)));
      series_err =
          std::max(series_err, max_abs(permsym::two_time_correlation_floquet_perm(a, b, fp.state, k, basis, sgrid),
                                       dense::two_time_correlation_floquet_dense(ca, cb, fd.state, map, periods)));
    }
  }
  const double worst = std::max({ss_err, floquet_err, fss_err, left_err, series_err});
  return {worst <= 1e-8, fmt::format("max mismatch: steady {:.1e}, K {:.1e}, Floquet steady {:.1e}, S^a {:.1e}, "
                                     "series {:.1e} (tol 1e-8)",
                                     ss_err, floquet_err, fss_err, left_err, series_err)};
}

Verdict meanfield_boundary() {
  const auto b = meanfield::phase_boundary(0.5, 1.0);
  const double gamma = b ? *b / 2.0 : NAN;
  double lo = 0.5, hi = 1.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (meanfield::cumulant_correlator(0.5, mid, mid).xx_correlator > 0.0 ? lo : hi) = mid;
  }
  const double root = 0.5 * (lo + hi);
  const double at = meanfield::cumulant_correlator(0.5, 1.0, 1.0).xx_correlator;
  const bool pass = gamma == 1.0 && std::abs(root - 1.0) <= 1e-12 && std::abs(at) <= 1e-12;
  return {pass, fmt::format("boundary gamma {}, correlator zero crossing at {:.15f}, value at gamma=1 {:.1e}", gamma,
                            root, at)};
}

double permsym_order(int n, double delta, double gamma) {
  analysis::CellOptions opts;
  opts.correlations = false;
  const auto out = analysis::evaluate_cell({analysis::Engine::Permsym, chain(n, 0.0, delta), gamma, 0.0}, opts);
  if (!out.converged) throw std::runtime_error(fmt::format("permsym N={} ({}, {}): {}", n, delta, gamma, out.error));
  return out.m_f;
}

Verdict phase_diagram() {
  std::vector<double> gamma, m;
  for (int k = 1; k <= 40; ++k) {
    gamma.push_back(0.05 * k);
    m.push_back(permsym_order(50, 0.5, gamma.back()));
  }
  const double m05 = m[9], m15 = m[29];
  const double peak = *std::max_element(m.begin(), m.end());
  double crossing = NAN;
  for (std::size_t k = 1; k < m.size(); ++k)
    if (m[k - 1] >= peak / 2 && m[k] < peak / 2) {
      crossing = gamma[k - 1] + (m[k - 1] - peak / 2) / (m[k - 1] - m[k]) * (gamma[k] - gamma[k - 1]);
      break;
    }
  const bool ratio_ok = m05 >= 3.0 * m15;
  const bool contour_ok = crossing >= 0.8 && crossing <= 1.2;
  return {ratio_ok && contour_ok,
          fmt::format("M_F(0.5)/M_F(1.5) = {:.3f}/{:.3f} = {:.2f} (>= 3: {}); half-maximum ({:.4f}) crossing at "
                      "gamma = {:.3f} (in [0.8, 1.2]: {})",
                      m05, m15, m05 / m15, ratio_ok ? "yes" : "no", peak / 2, crossing, contour_ok ? "yes" : "no")};
}

Verdict floquet_continuous() {
  std::vector<double> axis{0.2, 0.6, 1.0, 1.4, 1.8};
  double worst01 = 0, worst05 = 0;
  analysis::CellOptions opts;
  opts.correlations = false;
  for (double d : axis)
    for (double g : axis) {
      const double cont = permsym_order(50, d, g);
      for (double tau : {0.1, 0.5}) {
        const auto f = analysis::evaluate_cell({analysis::Engine::FloquetPermsym, chain(50, 0.0, d), g, tau}, opts);
        if (!f.converged) throw std::runtime_error(fmt::format("Floquet ({}, {}, tau {}): {}", d, g, tau, f.error));
        (tau == 0.1 ? worst01 : worst05) = std::max(tau == 0.1 ? worst01 : worst05, std::abs(f.m_f - cont));
      }
    }

  // Dense N = 4 first-order convergence of the Floquet fixed point.
  const auto h = hamiltonian(chain(4, 0.0, 0.5));
  const auto cont = dense::steady_state_dense(dense::build_liouvillian(h, {1.0, 1.0}));
  std::vector<double> taus{1e-3, 3e-3, 1e-2}, dist;
  for (double tau : taus)
    dist.push_back(dense::trace_distance(dense::floquet_steady_state_dense(h, tau, tau).state.rho, cont.state.rho));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const double x = std::log(taus[k]), y = std::log(dist[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  const bool pass = worst01 < 0.02 && worst05 < 0.1 && dist[0] < 5e-3 && std::abs(slope - 1.0) <= 0.2;
  return {pass, fmt::format("5x5 max |dM_F|: tau=0.1 {:.4f} (< 0.02), tau=0.5 {:.4f} (< 0.1); dense N=4 distance at "
                            "tau=1e-3 {:.2e} (< 5e-3), slope {:.3f} (1 +- 0.2)",
                            worst01, worst05, dist[0], slope)};
}

Verdict trs_diagnostics() {
  auto cell = [](double delta, double gamma) {
    const auto out = analysis::evaluate_cell({analysis::Engine::Dense, chain(10, 1.0, delta), gamma, 0.0});
    if (!out.converged || !out.trs.norm_c || !out.trs.norm_chi)
      throw std::runtime_error(fmt::format("dense N=10 ({}, {}): {}", delta, gamma, out.error));
    return out.trs;
  };
  const auto star = cell(0.5, 1.0), trs = cell(1.25, 0.3);
  const bool pass = *star.norm_c < 0.5 && std::abs(*star.norm_chi - 2) < 0.4 && std::abs(*trs.norm_c - 2) < 0.5 &&
                    std::abs(*trs.norm_chi - 2) < 0.5;
  return {pass, fmt::format("(0.5, 1): norm_c {:.3f} (< 0.5), norm_chi {:.3f} (2 +- 0.4); (1.25, 0.3): norm_c {:.3f}, "
                            "norm_chi {:.3f} (2 +- 0.5)",
                            *star.norm_c, *star.norm_chi, *trs.norm_c, *trs.norm_chi)};
}

Verdict finite_size() {
  std::vector<double> norm_c;
  double chi = NAN;
  std::string trail;
  for (int n : {10, 20, 30, 40, 50}) {
    const auto out = analysis::evaluate_cell({analysis::Engine::Permsym, chain(n, 0.0, 0.5), 1.0, 0.0});
    if (!out.converged || !out.trs.norm_c || !out.trs.norm_chi)
      throw std::runtime_error(fmt::format("permsym N={}: {}", n, out.error));
    norm_c.push_back(*out.trs.norm_c);
    chi = *out.trs.norm_chi;
    trail += fmt::format("{}{:.3f}", trail.empty() ? "" : ", ", *out.trs.norm_c);
  }
  const bool decreasing = std::adjacent_find(norm_c.begin(), norm_c.end(), std::less_equal<>()) == norm_c.end();
  return {decreasing && std::abs(chi - 2) <= 0.3,
          fmt::format("norm_c over N=10..50: {} (strictly decreasing: {}); norm_chi(N=50) {:.3f} (2 +- 0.3)", trail,
                      decreasing ? "yes" : "no", chi)};
}

Verdict hsign_audit() {
  std::mt19937_64 rng(7);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  double worst = 0;
  bool pass = true;
  for (int draw = 0; draw < 10; ++draw) {
    const bool floquet = draw >= 5;
    const auto spec = chain(4, uniform(0.0, 2.0), uniform(0.1, 1.5));
    model::DissipationSpec diss;
    if (floquet) {
      diss.mode = model::Floquet{uniform(0.05, 1.0), uniform(0.05, 0.9)};
    } else {
      const double g = uniform(0.2, 1.5);
      diss.mode = model::Continuous{g, g};
    }
    const auto report =
        analysis::h_sign_audit(spec, diss, floquet ? analysis::Engine::FloquetDense : analysis::Engine::Dense, 1e-8);
    pass = pass && report.passed();
    for (const auto& c : report.checks) worst = std::max(worst, c.mismatch);
  }
  return {pass, fmt::format("5 continuous + 5 Floquet draws at N=4, worst mismatch {:.1e} (tol 1e-8)", worst)};
}

Verdict protocols() {
  std::mt19937_64 rng(11);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const std::vector<double> grid{0.0, 0.5, 1.3, 3.0};
  // Both sides are integrated separately, so the integrator must sit well below 1e-10.
  dense::EvolveOptions tight;
  tight.rtol = 1e-12;
  tight.atol = 1e-14;
  double worst = 0;
  for (int draw = 0; draw < 20; ++draw) {
    const int n = 1 + draw % 4;
    const auto h = hamiltonian(chain(n, uniform(0.0, 2.0), uniform(0.1, 1.5)));
    const double g = uniform(0.2, 1.5);
    const auto l = dense::build_liouvillian(h, {g, g});
    const auto rho = dense::steady_state_dense(l).state;
    const int site = static_cast<int>(rng() % static_cast<unsigned>(n));
    dense::ProtocolOptions opts;
    opts.samples = 16;
    opts.evolve = tight;
    for (auto [a, b] : {std::pair{Axis::X, Axis::Y}, std::pair{Axis::Y, Axis::X}}) {
      opts.collective_axis = a;
      opts.local_axis = b;
      const auto c = dense::two_time_correlation_dense(dense::collective(n, a), dense::pauli(n, site, b), rho, l, grid, tight);
      const auto re = dense::protocol_re(rho, l, site, grid, opts);
      const auto im = dense::protocol_im(rho, l, site, grid, opts);
      for (std::size_t k = 0; k < grid.size(); ++k)
        worst = std::max({worst, std::abs(re[k].exact - c[k].real()), std::abs(im[k].exact - c[k].imag())});
    }
  }

  const auto h = hamiltonian(chain(2, 1.0, 0.7));
  const auto l = dense::build_liouvillian(h, {0.5, 0.5});
  const auto rho = dense::steady_state_dense(l).state;
  const double t[] = {1.0};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const std::vector<long> samples{100, 1000, 10000, 100000};
  for (long m : samples) {
    dense::ProtocolOptions opts;
    opts.samples = m;
    const double se = dense::protocol_re(rho, l, 0, t, opts)[0].standard_error;
    const double x = std::log(static_cast<double>(m)), y = std::log(se);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double cnt = static_cast<double>(samples.size());
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return {worst <= 1e-10 && std::abs(slope + 0.5) <= 0.1,
          fmt::format("exact branches vs regression: worst {:.1e} (tol 1e-10); standard-error slope {:.3f} (-0.5 +- 0.1)",
                      worst, slope)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string drop_last_column(const std::string& csv) {
  std::istringstream is(csv);
  std::string line, out;
  while (std::getline(is, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

Verdict infrastructure() {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "dissim-acceptance-infra";
  fs::remove_all(dir);
  auto config = [&](const std::string& name, int workers) {
    return sweep::SweepConfig::from_json({{"name", name},
                                          {"engine", "permsym"},
                                          {"model", {{"n", 12}}},
                                          {"delta_grid", {{"min", 0.25}, {"max", 1.25}, {"count", 3}}},
                                          {"gamma_grid", {{"min", 0.5}, {"max", 1.5}, {"count", 3}}},
                                          {"outputs", {{"directory", dir.string()}}},
                                          {"run", {{"workers", workers}, {"seed", 3}, {"checkpoint_interval", 1}}}});
  };
  std::vector<std::string> csv;
  for (int workers : {1, 2, 4}) {
    const auto r = sweep::run_sweep(config("w" + std::to_string(workers), workers));
    csv.push_back(drop_last_column(slurp(sweep::emit(r, dir, {"csv"}).front())));
  }
  const bool identical = csv[0] == csv[1] && csv[1] == csv[2];

  const auto cut = config("cut", 1);
  const auto partial = sweep::run_sweep(cut, {.stop_after = 4});
  const auto resumed = sweep::run_sweep(cut);
  const auto again = sweep::run_sweep(cut);
  fs::remove_all(dir);
  const bool resume_ok = partial.recomputed == 4 && resumed.recomputed == 5 && again.recomputed == 0 &&
                         resumed.all_converged() && drop_last_column(sweep::to_csv(resumed)) == csv[0];
  return {identical && resume_ok,
          fmt::format("CSV identical across 1/2/4 workers (wall_seconds excluded): {}; interrupted after {}, resume "
                      "solved {}, rerun solved {}",
                      identical ? "yes" : "no", partial.recomputed, resumed.recomputed, again.recomputed)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"oracle-equivalence", oracle_equivalence}, {"meanfield-boundary", meanfield_boundary},
      {"phase-diagram", phase_diagram},           {"floquet-continuous", floquet_continuous},
      {"trs-diagnostics", trs_diagnostics},       {"finite-size", finite_size},
      {"hsign-audit", hsign_audit},               {"protocols", protocols},
      {"infrastructure", infrastructure},
  };

  CLI::App app{"dissim acceptance gate"};
  std::vector<std::string> only;
  bool list = false;
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_flag("--list", list, "print criterion keys and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : criteria) std::cout << c.key << "\n";
    return 0;
  }
  for (const auto& key : only)
    if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.key == key; })) {
      std::cerr << "unknown criterion " << key << "\n";
      return 2;
    }

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.key) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << c.key << ": " << v.detail << fmt::format(" [{:.1f} s]", secs)
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
