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
#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "dissim/dense.hpp"
#include "dissim/error.hpp"
#include "dissim/numerics/gmres.hpp"

namespace dissim::dense {

namespace {

void check_parameters(double tau, double p) {
  model::validate(model::Floquet{tau, p});
}

}  // namespace

std::vector<DenseOperator> floquet_kraus_operators(int n_spins, int site, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("reset probability must lie in [0, 1]");
  if (site < 0 || site >= n_spins) throw ArgumentError("site index out of range");
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  const Eigen::Index m = Eigen::Index{1} << site;
  const double sp = std::sqrt(p);
  std::vector<Eigen::Triplet<cd>> k0, k1, k2;
  for (Eigen::Index a = 0; a < dim; ++a) {
    if (a & m) {
      k0.emplace_back(a, a, sp);  // sqrt(p)|1><1|
    } else {
      k1.emplace_back(a | m, a, sp);  // sqrt(p)|1><0|
    }
    k2.emplace_back(a, a, std::sqrt(1.0 - p));
  }
  std::vector<DenseOperator> out;
  for (auto* t : {&k0, &k1, &k2}) {
    SparseOp op(dim, dim);
    op.setFromTriplets(t->begin(), t->end());
    out.push_back({n_spins, std::move(op)});
  }
  return out;
}

FloquetMap::FloquetMap(const DenseOperator& hamiltonian, double tau, double p)
    : n_spins_(hamiltonian.n_spins), tau_(tau), p_(p) {
  check_parameters(tau, p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hamiltonian.to_dense());
  const Eigen::VectorXcd phases = (es.eigenvalues().cast<cd>() * cd(0.0, -tau)).array().exp();
  propagator_ = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

void FloquetMap::apply_channel(Eigen::MatrixXcd& x) const {
  const Eigen::Index n = x.rows();
  if (p_ == 0.0) return;
  const double keep = 1.0 - p_;
  for (int i = 0; i < n_spins_; ++i) {
    const Eigen::Index m = Eigen::Index{1} << i;
    // Entries with bit i set in both row and column receive the traced-out weight,
    // all others decay by (1 - p).
    for (Eigen::Index b = 0; b < n; ++b) {
      cd* col = x.col(b).data();
      if (b & m) {
        const cd* src = x.col(b ^ m).data();
        for (Eigen::Index a = 0; a < n; ++a) {
          if (a & m) col[a] += p_ * src[a ^ m];
        }
      }
    }
    for (Eigen::Index b = 0; b < n; ++b) {
      cd* col = x.col(b).data();
      for (Eigen::Index a = 0; a < n; ++a)
        if (!((a & m) && (b & m))) col[a] *= keep;
    }
  }
}

void FloquetMap::apply(Eigen::MatrixXcd& x) const {
  if (x.rows() != propagator_.rows() || x.cols() != propagator_.cols()) throw ArgumentError("operand dimension mismatch");
  x = (propagator_ * x * propagator_.adjoint()).eval();
  apply_channel(x);
}

DenseState floquet_step_dense(const DenseState& state, const DenseOperator& hamiltonian, double tau, double p) {
  FloquetMap map(hamiltonian, tau, p);
  DenseState out = state;
  map.apply(out.rho);
  return out;
}

FloquetSteadyState floquet_steady_state_dense(const DenseOperator& hamiltonian, double tau, double p,
                                             const FloquetSolveOptions& opts) {
  check_parameters(tau, p);
  if (p <= 0.0) throw ArgumentError("Floquet steady state requires p > 0");
  const int n_spins = hamiltonian.n_spins;
  FloquetSteadyState result;
  if (p == 1.0) {
    result.state = DenseState::all_pumped(n_spins);
    result.info = {"reset", 0, 0.0, true, 0.0};
    return result;
  }

  const FloquetMap map(hamiltonian, tau, p);
  const Eigen::Index n = hamiltonian.dim();
  const Eigen::Index size = n * n;
  auto distance_to_image = [&](const Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd img = rho;
    map.apply(img);
    return trace_distance(img, rho);
  };

  // Bordered system (I - F) x + v tr(x) = v with v = I / n; its solution is the unit-trace fixed point.
  const Eigen::MatrixXcd v_mat = DenseState::maximally_mixed(n_spins).rho;
  const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(v_mat.data(), size);
  Eigen::MatrixXcd work(n, n);
  auto apply = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    std::copy(in.data(), in.data() + size, work.data());
    const cd tr = work.trace();
    map.apply(work);
    out = in - Eigen::Map<const Eigen::VectorXcd>(work.data(), size) + v * tr;
  };
  Eigen::VectorXcd x = v;
  numerics::GmresOptions gopts;
  gopts.restart = static_cast<int>(std::min<Eigen::Index>(opts.restart, size));
  gopts.max_iterations = opts.max_iterations;
  gopts.tol = 1e-14;
  const auto g = numerics::gmres<cd>(apply, {}, v, x, gopts);

  Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(x.data(), n, n);
  rho /= rho.trace();
  rho = (0.5 * (rho + rho.adjoint())).eval();
  double dist = distance_to_image(rho);
  int iterations = g.iterations;

  // Plain iteration polishes the Krylov answer and exposes oscillation if there is no fixed point.
  double previous = dist;
  int rises = 0;
  for (int k = 0; k < opts.max_iterations && dist > opts.tol; ++k) {
    map.apply(rho);
    rho /= rho.trace();
    dist = distance_to_image(rho);
    ++iterations;
    if (dist > previous * (1.0 - 1e-12)) ++rises;
    previous = dist;
    if (rises > 50) break;
  }
  if (dist > opts.tol) {
    if (rises > 50)
      throw LimitCycleError("Floquet iteration oscillates, trace distance stays at " + std::to_string(dist));
    throw ConvergenceError("Floquet fixed point not reached, trace distance " + std::to_string(dist));
  }
  result.state = {n_spins, std::move(rho)};
  result.info = {"gmres", iterations, dist, true, 0.0};
  return result;
}

std::vector<cd> two_time_correlation_floquet_dense(const DenseOperator& a, const DenseOperator& b,
                                                   const DenseState& rho_s, const FloquetMap& map,
                                                   std::span<const int> periods) {
  for (std::size_t k = 0; k < periods.size(); ++k) {
    if (periods[k] < 0) throw ArgumentError("period counts must be non-negative");
    if (k > 0 && periods[k] < periods[k - 1]) throw ArgumentError("period counts must be sorted ascending");
  }
  Eigen::MatrixXcd x = b.matrix * rho_s.rho;
  std::vector<cd> out(periods.size());
  int done = 0;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    for (; done < periods[k]; ++done) map.apply(x);
    out[k] = expectation(a, x);
  }
  return out;
}

}  // namespace dissim::dense
