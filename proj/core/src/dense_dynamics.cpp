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
#include <cstring>
#include <memory>
#include <random>
#include <string>

#include <Eigen/SparseLU>

#include "dense_real_form.hpp"
#include "dissim/dense.hpp"
#include "dissim/error.hpp"
#include "dissim/numerics/krylov.hpp"
#include "dissim/numerics/ode.hpp"

namespace dissim::dense {

namespace {

void check_grid(std::span<const double> times) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]) || times[k] < 0.0) throw ArgumentError("time grid entries must be finite and >= 0");
    if (k > 0 && times[k] < times[k - 1]) throw ArgumentError("time grid must be sorted ascending");
  }
}

bool use_runge_kutta(const SuperOperator& L, const EvolveOptions& opts) {
  switch (opts.method) {
    case EvolveMethod::RungeKutta:
      return true;
    case EvolveMethod::Krylov:
      return false;
    case EvolveMethod::Auto:
      break;
  }
  return L.n_spins() <= opts.runge_kutta_max_spins;
}

Eigen::VectorXcd random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cd(g(rng), g(rng));
  return v / v.norm();
}

double relative_residual(const SuperOperator& L, const Eigen::MatrixXcd& rho) {
  Eigen::MatrixXcd out;
  L.apply(rho, out);
  return out.norm() / rho.norm();
}

DenseState finalize_state(int n_spins, Eigen::MatrixXcd rho) {
  rho /= rho.trace();
  rho = (0.5 * (rho + rho.adjoint())).eval();
  return {n_spins, std::move(rho)};
}

}  // namespace

void propagate(const Eigen::MatrixXcd& x0, const SuperOperator& L, std::span<const double> times,
               const std::function<void(std::size_t, const Eigen::MatrixXcd&)>& observe, const EvolveOptions& opts) {
  check_grid(times);
  const Eigen::Index n = L.hilbert_dim();
  if (x0.rows() != n || x0.cols() != n) throw ArgumentError("initial operator dimension mismatch");
  if (times.empty()) return;

  Eigen::MatrixXcd view(n, n);
  auto emit = [&](std::size_t k, const Eigen::VectorXcd& v) {
    std::memcpy(view.data(), v.data(), sizeof(cd) * static_cast<std::size_t>(v.size()));
    observe(k, view);
  };
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(x0.data(), L.dim());

  if (use_runge_kutta(L, opts)) {
    numerics::OdeOptions ode;
    ode.rtol = opts.rtol;
    ode.atol = opts.atol;
    numerics::integrate_dopri5(
        v, 0.0, times,
        [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
          out.resize(in.size());
          L.apply(in.data(), out.data());
        },
        emit, ode);
    return;
  }

  numerics::KrylovOptions kopts;
  kopts.dimension = opts.krylov_dimension;
  kopts.tol = opts.krylov_tol;

  if (L.has_real_form()) {
    // Split x0 = X1 + i X2 into Hermitian parts and each part into parity sectors;
    // every nonzero piece is propagated in the real blocked form.
    struct Piece {
      const detail::RealSectorOperator* op;
      cd coeff;
      Eigen::VectorXd v;
      std::unique_ptr<numerics::KrylovPropagator<double>> krylov;
    };
    std::vector<std::unique_ptr<detail::RealSectorOperator>> ops;
    ops.push_back(std::make_unique<detail::RealSectorOperator>(L, detail::Sector::SameParity));
    ops.push_back(std::make_unique<detail::RealSectorOperator>(L, detail::Sector::MixedParity));
    const Eigen::MatrixXcd parts[2] = {0.5 * (x0 + x0.adjoint()), cd(0.0, -0.5) * (x0 - x0.adjoint())};
    const cd coeffs[2] = {1.0, cd(0.0, 1.0)};
    const double scale = x0.norm();
    std::vector<Piece> pieces;
    for (int h = 0; h < 2; ++h)
      for (const auto& op : ops) {
        Piece piece{op.get(), coeffs[h], {}, nullptr};
        op->pack(parts[h], piece.v);
        if (piece.v.norm() <= 1e-15 * scale) continue;
        piece.krylov = std::make_unique<numerics::KrylovPropagator<double>>(
            [sector = op.get()](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
              out.resize(in.size());
              sector->apply(in.data(), out.data());
            },
            L.norm_bound(), kopts);
        pieces.push_back(std::move(piece));
      }
    if (pieces.size() == 1) {
      Piece& piece = pieces.front();
      piece.krylov->propagate_grid(piece.v, times, [&](std::size_t k, const Eigen::VectorXd& w) {
        view.setZero();
        piece.op->unpack_add(w, piece.coeff, view);
        observe(k, view);
      });
      return;
    }
    // Several pieces advance one after another over batches of grid points whose
    // accumulated outputs fit a fixed memory budget.
    constexpr double kBatchBytes = 256.0 * 1024 * 1024;
    const auto batch = static_cast<std::size_t>(
        std::max(1.0, kBatchBytes / (static_cast<double>(n) * static_cast<double>(n) * sizeof(cd))));
    std::vector<Eigen::MatrixXcd> outputs;
    double t_done = 0.0;
    for (std::size_t first = 0; first < times.size(); first += batch) {
      const std::size_t count = std::min(batch, times.size() - first);
      outputs.assign(count, Eigen::MatrixXcd::Zero(n, n));
      std::vector<double> offsets(count);
      for (std::size_t k = 0; k < count; ++k) offsets[k] = times[first + k] - t_done;
      for (auto& piece : pieces)
        piece.krylov->propagate_grid(piece.v, offsets, [&](std::size_t k, const Eigen::VectorXd& w) {
          piece.op->unpack_add(w, piece.coeff, outputs[k]);
        });
      for (std::size_t k = 0; k < count; ++k) observe(first + k, outputs[k]);
      t_done = times[first + count - 1];
    }
    return;
  }

  numerics::KrylovPropagator<cd> krylov(
      [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        out.resize(in.size());
        L.apply(in.data(), out.data());
      },
      L.norm_bound(), kopts);
  krylov.propagate_grid(v, times, emit);
}

std::vector<std::vector<cd>> propagate_expectations(const Eigen::MatrixXcd& x0, const SuperOperator& L,
                                                    std::span<const double> times,
                                                    std::span<const DenseOperator> observables,
                                                    const EvolveOptions& opts) {
  check_grid(times);
  std::vector<std::vector<cd>> out(times.size(), std::vector<cd>(observables.size(), 0.0));
  if (use_runge_kutta(L, opts) || !L.has_real_form()) {
    propagate(
        x0, L, times,
        [&](std::size_t k, const Eigen::MatrixXcd& x) {
          for (std::size_t j = 0; j < observables.size(); ++j) out[k][j] = expectation(observables[j], x);
        },
        opts);
    return out;
  }

  numerics::KrylovOptions kopts;
  kopts.dimension = opts.krylov_dimension;
  kopts.tol = opts.krylov_tol;
  const Eigen::MatrixXcd parts[2] = {0.5 * (x0 + x0.adjoint()), cd(0.0, -0.5) * (x0 - x0.adjoint())};
  const cd coeffs[2] = {1.0, cd(0.0, 1.0)};
  const double scale = x0.norm();
  for (auto sector : {detail::Sector::SameParity, detail::Sector::MixedParity}) {
    const detail::RealSectorOperator op(L, sector);
    std::vector<Eigen::VectorXd> functionals;
    for (const auto& a : observables) {
      auto [re, im] = op.functional(a);
      functionals.push_back(std::move(re));
      functionals.push_back(std::move(im));
    }
    for (int h = 0; h < 2; ++h) {
      Eigen::VectorXd v;
      op.pack(parts[h], v);
      if (v.norm() <= 1e-15 * scale) continue;
      numerics::KrylovPropagator<double> krylov(
          [&op](const Eigen::VectorXd& in, Eigen::VectorXd& y) {
            y.resize(in.size());
            op.apply(in.data(), y.data());
          },
          L.norm_bound(), kopts);
      krylov.propagate_functionals(v, times, functionals, [&](std::size_t k, const Eigen::VectorXd& values) {
        for (std::size_t j = 0; j < observables.size(); ++j)
          out[k][j] += coeffs[h] * cd(values(2 * j), values(2 * j + 1));
      });
    }
  }
  return out;
}

DenseState evolve(const DenseState& state, const SuperOperator& L, double t_final, const EvolveOptions& opts) {
  if (!(t_final >= 0.0)) throw ArgumentError("t_final must be >= 0");
  if (t_final == 0.0) return state;
  DenseState out{state.n_spins, {}};
  const double grid[] = {t_final};
  propagate(state.rho, L, grid, [&](std::size_t, const Eigen::MatrixXcd& x) { out.rho = x; }, opts);
  return out;
}

DenseSteadyState steady_state_dense(const SuperOperator& L, const SteadyStateOptions& opts) {
  // Without pumping the dynamics are unital and parity-conserving: I and prod Z_i are both stationary.
  if (L.rates().gamma_e <= 0.0) throw DegenerateError("steady state is not unique without pumping (gamma_e = 0)");
  const int n_spins = L.n_spins();
  DenseSteadyState result;

  if (n_spins <= opts.factorization_max_spins) {
    const Eigen::SparseMatrix<cd> Lm = L.materialize(std::max(7, opts.factorization_max_spins));
    Eigen::SparseMatrix<cd> shifted = Lm;
    for (Eigen::Index i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) -= opts.shift;
    shifted.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<cd>> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) throw ConvergenceError("sparse LU factorization of the shifted Liouvillian failed");
    const double l_norm = Lm.norm();

    auto inverse_iterate = [&](Eigen::VectorXcd x, int max_iter, int& used) {
      double res = 0.0;
      for (used = 1; used <= max_iter; ++used) {
        x = lu.solve(x);
        x /= x.norm();
        res = (Lm * x).norm() / l_norm;
        if (res <= opts.tolerance) break;
      }
      return std::pair{x, res};
    };

    int used = 0;
    auto [x, res] = inverse_iterate(random_vector(L.dim(), opts.seed), opts.max_iterations, used);
    if (res > opts.tolerance)
      throw ConvergenceError("inverse iteration did not converge, residual " + std::to_string(res));
    int used2 = 0;
    auto [x2, res2] = inverse_iterate(random_vector(L.dim(), opts.seed ^ 0x9e3779b97f4a7c15ULL), 4, used2);
    const double overlap_defect = (x2 - x * x.dot(x2)).norm();
    if (overlap_defect > 1e-6)
      throw DegenerateError("steady state is not unique (independent starts differ by " +
                            std::to_string(overlap_defect) + ")");

    Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(x.data(), L.hilbert_dim(), L.hilbert_dim());
    result.state = finalize_state(n_spins, std::move(rho));
    const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(result.state.rho.data(), L.dim());
    result.info.method = "shift-invert";
    result.info.iterations = used;
    result.info.residual = (Lm * v).norm() / l_norm;
    result.info.converged = true;
    return result;
  }

  // Long-time evolution from the maximally mixed state, in chunks with a residual check.
  Eigen::MatrixXcd rho = DenseState::maximally_mixed(n_spins).rho;
  double t = 0.0;
  int chunks = 0;
  if (L.has_real_form()) {
    const detail::RealSectorOperator op(L, detail::Sector::SameParity);
    Eigen::VectorXd v, lv(op.size());
    op.pack(rho, v);
    numerics::KrylovOptions kopts;
    kopts.dimension = opts.evolve.krylov_dimension;
    kopts.tol = opts.evolve.krylov_tol;
    numerics::KrylovPropagator<double> krylov(
        [&op](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
          out.resize(in.size());
          op.apply(in.data(), out.data());
        },
        L.norm_bound(), kopts);
    auto residual = [&] {
      op.apply(v.data(), lv.data());
      return lv.norm() / v.norm();
    };
    double res = residual();
    while (t < opts.evolve_horizon && res > opts.tolerance) {
      const double step = std::min(opts.evolve_chunk, opts.evolve_horizon - t);
      krylov.propagate(v, step);
      t += step;
      ++chunks;
      res = residual();
    }
    rho.setZero();
    op.unpack_add(v, 1.0, rho);
  } else {
    double res = relative_residual(L, rho);
    while (t < opts.evolve_horizon && res > opts.tolerance) {
      const double step = std::min(opts.evolve_chunk, opts.evolve_horizon - t);
      const double grid[] = {step};
      propagate(rho, L, grid, [&](std::size_t, const Eigen::MatrixXcd& x) { rho = x; }, opts.evolve);
      t += step;
      ++chunks;
      res = relative_residual(L, rho);
    }
  }
  result.state = finalize_state(n_spins, std::move(rho));
  result.info.method = "evolution";
  result.info.iterations = chunks;
  result.info.residual = relative_residual(L, result.state.rho);
  result.info.horizon = t;
  result.info.converged = result.info.residual <= opts.evolve_residual_tol;
  return result;
}

std::vector<cd> two_time_correlation_dense(const DenseOperator& a, const DenseOperator& b, const DenseState& rho_s,
                                           const SuperOperator& L, std::span<const double> t_grid,
                                           const EvolveOptions& opts) {
  check_grid(t_grid);
  const Eigen::MatrixXcd x0 = b.matrix * rho_s.rho;
  const auto values = propagate_expectations(x0, L, t_grid, std::span<const DenseOperator>(&a, 1), opts);
  std::vector<cd> out(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) out[k] = values[k][0];
  return out;
}

}  // namespace dissim::dense
