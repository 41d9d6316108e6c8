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
#include <random>

#include <Eigen/SparseLU>

#include "dissim/error.hpp"
#include "dissim/numerics/gmres.hpp"
#include "dissim/numerics/krylov.hpp"
#include "dissim/permsym.hpp"

namespace dissim::permsym {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Eigen::Index;
using Eigen::VectorXd;

SpMat real_matrix(const SparseMatrix& m, const char* what) {
  SpMat r = m.real();
  if (SparseMatrix(m - r.cast<cd>()).norm() > 1e-12 * std::max(1.0, r.norm()))
    throw UnsupportedError(std::string(what) + " has complex entries; expected a real generator");
  return r;
}

double one_norm(const SpMat& m) {
  double best = 0.0;
  for (Index c = 0; c < m.outerSize(); ++c) {
    double s = 0.0;
    for (SpMat::InnerIterator it(m, c); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

// One parity sector: the generators never mix even and odd (nx + ny).
struct Block {
  std::vector<Index> indices;
  std::vector<Index> local;  // full -> block index, -1 outside

  Block(const PermBasis& basis, bool even) : indices(basis.sector(even)), local(basis.size(), -1) {
    for (std::size_t k = 0; k < indices.size(); ++k) local[indices[k]] = static_cast<Index>(k);
  }

  Index size() const { return static_cast<Index>(indices.size()); }

  SpMat restrict(const SpMat& m) const {
    std::vector<Eigen::Triplet<double>> t;
    for (Index c = 0; c < m.outerSize(); ++c) {
      if (local[c] < 0) continue;
      for (SpMat::InnerIterator it(m, c); it; ++it)
        if (local[it.row()] >= 0) t.emplace_back(local[it.row()], local[c], it.value());
    }
    SpMat out(size(), size());
    out.setFromTriplets(t.begin(), t.end());
    out.makeCompressed();
    return out;
  }

  VectorXd gather(const VectorXd& full) const {
    VectorXd v(size());
    for (Index k = 0; k < size(); ++k) v(k) = full(indices[k]);
    return v;
  }

  VectorXd scatter(const VectorXd& v, Index full_size) const {
    VectorXd out = VectorXd::Zero(full_size);
    for (Index k = 0; k < size(); ++k) out(indices[k]) = v(k);
    return out;
  }
};

VectorXd random_unit(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  VectorXd v(n);
  for (Index k = 0; k < n; ++k) v(k) = normal(rng);
  return v / v.norm();
}

PermState finish_state(const VectorXd& v, const PermBasis& basis) {
  PermState s{basis.n_spins(), v.cast<cd>()};
  const cd tr = s.trace(basis);
  if (std::abs(tr) < 1e-300) throw ConvergenceError("steady-state candidate has zero trace");
  s.coeffs /= tr.real();
  return s;
}

// Floquet period restricted to a parity block, applied matrix-free.
class BlockFloquet {
 public:
  BlockFloquet(const FloquetOperator& k, const Block& block)
      : lh_(block.restrict(real_matrix(k.hamiltonian_generator().matrix, "Hamiltonian generator"))),
        e_(block.restrict(real_matrix(k.reset_map().matrix, "reset map"))),
        tau_(k.tau()),
        krylov_([this](const VectorXd& x, VectorXd& y) { y = lh_ * x; }, one_norm(lh_), options()) {}

  void apply(const VectorXd& in, VectorXd& out) {
    VectorXd v = in;
    if (tau_ > 0.0) krylov_.propagate(v, tau_);
    out = e_ * v;
  }

  const SpMat& hamiltonian() const { return lh_; }
  const SpMat& reset() const { return e_; }

 private:
  static numerics::KrylovOptions options() {
    numerics::KrylovOptions o;
    o.tol = 1e-13;
    return o;
  }

  SpMat lh_, e_;
  double tau_;
  numerics::KrylovPropagator<double> krylov_;
};

std::vector<int> stroboscopic_indices(std::span<const double> t_grid, double tau) {
  std::vector<int> out;
  out.reserve(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const double t = t_grid[k];
    if (!(t >= 0.0)) throw ArgumentError("time grid entries must be non-negative");
    if (k > 0 && t < t_grid[k - 1]) throw ArgumentError("time grid must be sorted ascending");
    const double n = tau > 0.0 ? std::round(t / tau) : 0.0;
    if (tau == 0.0 ? t != 0.0 : std::abs(n * tau - t) > 1e-9 * std::max(1.0, t))
      throw ArgumentError("Floquet correlation times must be integer multiples of tau");
    out.push_back(static_cast<int>(n));
  }
  return out;
}

void check_grid(std::span<const double> t_grid) {
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] >= 0.0)) throw ArgumentError("time grid entries must be non-negative");
    if (k > 0 && t_grid[k] < t_grid[k - 1]) throw ArgumentError("time grid must be sorted ascending");
  }
}

// vec(B rho_s) split into real and imaginary parts.
std::pair<VectorXd, VectorXd> seed_vector(Axis b, const PermState& rho_s, const PermBasis& basis) {
  if (rho_s.coeffs.size() != basis.size()) throw ArgumentError("state does not match the basis");
  const Eigen::VectorXcd x0 = left_multiplier_perm(b, basis).matrix * rho_s.coeffs;
  return {x0.real(), x0.imag()};
}

}  // namespace

PermSteadyState steady_state_perm(const PermSuperMatrix& L, const PermBasis& basis, const SteadyStateOptions& opts) {
  if (L.kind != MatrixKind::Liouvillian) throw ArgumentError("steady_state_perm needs a Liouvillian");
  if (L.size() != basis.size()) throw ArgumentError("Liouvillian does not match the basis");
  const SpMat full = real_matrix(L.matrix, "Liouvillian");
  const Block even(basis, true);
  const SpMat l = even.restrict(full);
  const Index n = l.rows();

  SpMat shifted = l;
  for (Index k = 0; k < n; ++k) shifted.coeffRef(k, k) -= opts.shift;
  shifted.makeCompressed();
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) throw ConvergenceError("sparse LU of the shifted Liouvillian failed");

  std::mt19937_64 rng(opts.seed);
  PermSteadyState out;
  out.info.method = "inverse-power";
  auto iterate = [&](VectorXd v, int max_iterations, int& used) {
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    for (used = 0; used < max_iterations; ++used) {
      v = lu.solve(v);
      v /= v.norm();
      const double r = (l * v).norm();
      if (r <= opts.tolerance) {
        ++used;
        break;
      }
      if (r < 0.5 * best) {
        best = r;
        since_best = 0;
      } else if (++since_best >= 20) {
        v = random_unit(n, rng);
        since_best = 0;
        best = std::numeric_limits<double>::infinity();
      }
    }
    return v;
  };

  int used = 0;
  const VectorXd v = iterate(random_unit(n, rng), opts.max_iterations, used);
  out.info.iterations = used;
  int extra = 0;
  const VectorXd w = iterate(random_unit(n, rng), 4, extra);
  const double defect = (w - v.dot(w) * v).norm();
  if (defect > 1e-6) throw DegenerateError("Liouvillian null space appears degenerate (overlap defect " +
                                           std::to_string(defect) + ")");

  out.state = finish_state(even.scatter(v, basis.size()), basis);
  const VectorXd x = out.state.coeffs.real();
  out.info.residual = (full * x).norm() / x.norm();
  out.info.converged = out.info.residual <= opts.tolerance;
  if (!out.info.converged)
    throw ConvergenceError("inverse power did not converge: residual " + std::to_string(out.info.residual));
  return out;
}

PermSteadyState steady_state_floquet_perm(const FloquetOperator& K, const PermBasis& basis,
                                          const FloquetSolveOptions& opts) {
  if (K.size() != basis.size()) throw ArgumentError("Floquet operator does not match the basis");
  if (!(K.p() > 0.0)) throw ArgumentError("Floquet steady state needs p > 0");
  const Index d = basis.size();
  PermSteadyState out;
  std::mt19937_64 rng(opts.seed);
  auto residual_of = [&](const VectorXd& x) {
    VectorXd kx;
    K.apply(x, kx);
    return (kx - x).norm() / x.norm();
  };

  if (K.p() == 1.0) {
    // The reset annihilates every non-identity string, so one period from the
    // maximally mixed state lands on the fixed point.
    VectorXd x = VectorXd::Zero(d), kx;
    x(basis.identity_index()) = 1.0;
    K.apply(x, kx);
    out.state = finish_state(kx, basis);
    out.info.method = "reset";
    out.info.iterations = 1;
  } else {
    const Block even(basis, true);
    BlockFloquet k(K, even);
    const Index n = even.size();
    const Index id = even.local[basis.identity_index()];

    // Bordered system (I - K) x + e_I x_I = e_I c_I; its solution is the fixed point.
    auto apply = [&](const VectorXd& x, VectorXd& y) {
      k.apply(x, y);
      y = x - y;
      y(id) += x(id);
    };
    // Preconditioner from the Cayley form of one period, C = (1 - tau L_H / 2)^-1 (1 + tau L_H / 2):
    // (1 - E C)(1 - tau L_H / 2) = (1 - tau L_H / 2) - E (1 + tau L_H / 2), which is sparse.
    // The border commutes through because e_I is a left null vector of L_H.
    const SpMat& lh = k.hamiltonian();
    const SpMat& e = k.reset();
    SpMat eye(n, n);
    eye.setIdentity();
    const SpMat half = 0.5 * K.tau() * lh;
    const SpMat right = eye - half;
    SpMat m = right - e * SpMat(eye + half);
    m.coeffRef(id, id) += 1.0;
    m.makeCompressed();
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success) throw ConvergenceError("preconditioner factorization failed");
    auto precond = [&](const VectorXd& x, VectorXd& y) { y = right * VectorXd(lu.solve(x)); };

    VectorXd b = VectorXd::Zero(n);
    b(id) = basis.norm(basis.identity_index());
    VectorXd x = right * VectorXd(lu.solve(b));
    numerics::GmresOptions gopts;
    gopts.restart = opts.restart;
    gopts.max_iterations = opts.max_iterations;
    // The border entry is tiny next to the rest of the state at large N, so the
    // stopping rule is scaled to the state norm rather than to |b|.
    gopts.tol = std::clamp(1e-3 * opts.tolerance * x.norm() / b.norm(), 1e-14, 1e-2);
    const auto res = numerics::gmres<double>(apply, precond, b, x, gopts);
    out.info.method = "gmres";
    out.info.iterations = res.iterations;

    // Plain iteration polishes what GMRES leaves behind.
    VectorXd kx;
    double r = 0.0;
    for (int it = 0; it < 200; ++it) {
      k.apply(x, kx);
      r = (kx - x).norm() / x.norm();
      if (r <= 0.1 * opts.tolerance) break;
      x = kx;
      ++out.info.iterations;
    }
    out.state = finish_state(even.scatter(x, d), basis);
  }

  const VectorXd x = out.state.coeffs.real();
  out.info.residual = residual_of(x);
  out.info.converged = out.info.residual <= opts.tolerance;
  if (!out.info.converged)
    throw ConvergenceError("Floquet fixed point did not converge: residual " + std::to_string(out.info.residual));

  if (opts.spectral_steps > 0 && K.p() < 1.0) {
    // Arnoldi on the traceless subspace, which K leaves invariant. The Ritz value is
    // an estimate only; for non-normal K it can sit slightly outside the spectrum.
    const int m = static_cast<int>(std::min<Index>(opts.spectral_steps, d - 1));
    std::vector<VectorXd> q;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    VectorXd v = random_unit(d, rng);
    v(basis.identity_index()) = 0.0;
    // A few plain periods first damp the fast modes out of the start vector.
    for (int j = 0; j < m; ++j) {
      VectorXd w;
      K.apply(v, w);
      w(basis.identity_index()) = 0.0;
      v = w / w.norm();
    }
    q.push_back(v);
    int used = m;
    for (int j = 0; j < m; ++j) {
      VectorXd w;
      K.apply(q[j], w);
      w(basis.identity_index()) = 0.0;
      for (int i = 0; i <= j; ++i) {
        h(i, j) = q[i].dot(w);
        w -= h(i, j) * q[i];
      }
      h(j + 1, j) = w.norm();
      if (h(j + 1, j) < 1e-14) {
        used = j + 1;
        break;
      }
      q.push_back(w / h(j + 1, j));
    }
    const Eigen::VectorXcd ritz = Eigen::EigenSolver<Eigen::MatrixXd>(h.topLeftCorner(used, used)).eigenvalues();
    const cd lambda2 = ritz(std::distance(ritz.data(), std::max_element(ritz.data(), ritz.data() + ritz.size(),
        [](cd a, cd b) { return std::abs(a) < std::abs(b); })));
    if (std::abs(lambda2 - 1.0) < 1e-10) throw DegenerateError("Floquet eigenvalue 1 appears degenerate");
    out.info.second_eigenvalue = std::abs(lambda2);
    out.info.slow_mixing = std::abs(lambda2) > 1.0 - 1e-12;
  }
  return out;
}

std::vector<cd> two_time_correlation_perm(Axis a, Axis b, const PermState& rho_s, const PermSuperMatrix& L,
                                          const PermBasis& basis, std::span<const double> t_grid) {
  if (L.kind != MatrixKind::Liouvillian) throw ArgumentError("continuous correlations need a Liouvillian");
  check_grid(t_grid);
  const SpMat full = real_matrix(L.matrix, "Liouvillian");
  const VectorXd f = collective_functional(basis, a);
  const auto [re, im] = seed_vector(b, rho_s, basis);
  const double scale = std::max(re.norm(), im.norm());

  std::vector<cd> out(t_grid.size(), cd(0.0));
  for (bool even_sector : {true, false}) {
    const Block block(basis, even_sector);
    const SpMat l = block.restrict(full);
    const std::vector<VectorXd> functionals{block.gather(f)};
    for (int part = 0; part < 2; ++part) {
      VectorXd v = block.gather(part == 0 ? re : im);
      if (v.norm() <= 1e-15 * scale) continue;
      numerics::KrylovOptions kopts;
      kopts.tol = 1e-12;
      numerics::KrylovPropagator<double> krylov([&l](const VectorXd& x, VectorXd& y) { y = l * x; }, one_norm(l),
                                                kopts);
      const cd unit = part == 0 ? cd(1.0) : cd(0.0, 1.0);
      krylov.propagate_functionals(v, t_grid, functionals,
                                   [&](std::size_t k, const VectorXd& values) { out[k] += unit * values(0); });
    }
  }
  return out;
}

std::vector<cd> two_time_correlation_floquet_perm(Axis a, Axis b, const PermState& rho_s, const FloquetOperator& K,
                                                  const PermBasis& basis, std::span<const double> t_grid) {
  if (K.size() != basis.size()) throw ArgumentError("Floquet operator does not match the basis");
  const std::vector<int> periods = stroboscopic_indices(t_grid, K.tau());
  const VectorXd f = collective_functional(basis, a);
  const auto [re, im] = seed_vector(b, rho_s, basis);
  const double scale = std::max(re.norm(), im.norm());

  std::vector<cd> out(t_grid.size(), cd(0.0));
  for (bool even_sector : {true, false}) {
    const Block block(basis, even_sector);
    BlockFloquet k(K, block);
    const VectorXd fb = block.gather(f);
    for (int part = 0; part < 2; ++part) {
      VectorXd v = block.gather(part == 0 ? re : im), next;
      if (v.norm() <= 1e-15 * scale) continue;
      const cd unit = part == 0 ? cd(1.0) : cd(0.0, 1.0);
      int at = 0;
      for (std::size_t j = 0; j < periods.size(); ++j) {
        for (; at < periods[j]; ++at) {
          k.apply(v, next);
          v.swap(next);
        }
        out[j] += unit * fb.dot(v);
      }
    }
  }
  return out;
}

}  // namespace dissim::permsym
