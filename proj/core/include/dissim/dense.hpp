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

// Full Hilbert-space engine (dimension 2^N). Basis convention: bit i of a
// basis index is the state of site i, with bit value 0 <-> |0> (Z = +1) and
// bit value 1 <-> |1> (Z = -1). Density matrices are column-major, so the
// storage order of rho is the column-stacked vectorization vec(rho).

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dissim/model.hpp"

namespace dissim::dense {

using cd = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<cd, Eigen::RowMajor>;

inline constexpr int kDefaultMaxSpins = 12;

enum class Axis { X, Y, Z };

/// Operator on the 2^N-dimensional Hilbert space, stored sparse.
struct DenseOperator {
  int n_spins = 0;
  SparseOp matrix;

  Eigen::Index dim() const { return matrix.rows(); }
  double hermiticity_error() const;
  Eigen::MatrixXcd to_dense() const { return Eigen::MatrixXcd(matrix); }
  DenseOperator operator-() const { return {n_spins, SparseOp(-matrix)}; }
};

DenseOperator identity(int n_spins);
DenseOperator pauli(int n_spins, int site, Axis axis);
DenseOperator collective(int n_spins, Axis axis);

struct DenseState {
  int n_spins = 0;
  Eigen::MatrixXcd rho;

  static DenseState maximally_mixed(int n_spins);
  // Product state with every spin in |1>, the fixed point of the pump.
  static DenseState all_pumped(int n_spins);

  cd trace() const { return rho.trace(); }
  double hermiticity_error() const { return (rho - rho.adjoint()).norm(); }
  double min_eigenvalue() const;
  // Throws ArgumentError if trace, Hermiticity or positivity tolerances are violated.
  void validate(double trace_tol = 1e-10, double herm_tol = 1e-10, double min_eig = -1e-8) const;
};

/// Tr(A X) for an arbitrary (not necessarily Hermitian) X.
cd expectation(const DenseOperator& op, const Eigen::MatrixXcd& x);
inline cd expectation(const DenseOperator& op, const DenseState& s) { return expectation(op, s.rho); }

/// (1/2) |a - b|_1 for Hermitian a, b.
double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

DenseOperator build_hamiltonian(const model::ModelSpec& spec, const model::CouplingMatrix& couplings,
                                int max_spins = kDefaultMaxSpins);

/// Lindblad generator with jumps sigma^- (rate gamma_e) and Z dephasing (gamma_d/4
/// prefactor), applied matrix-free. materialize() yields the explicit 4^N x 4^N
/// column-stacking superoperator for small N.
class SuperOperator {
 public:
  SuperOperator(DenseOperator hamiltonian, model::Continuous rates);

  int n_spins() const { return n_spins_; }
  Eigen::Index hilbert_dim() const { return dim_; }
  Eigen::Index dim() const { return dim_ * dim_; }
  const DenseOperator& hamiltonian() const { return hamiltonian_; }
  const model::Continuous& rates() const { return rates_; }

  // out = L(in); in and out are dim x dim and must not alias.
  void apply(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) const;
  void apply(const cd* in, cd* out) const;
  void apply_vec(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;

  // Real form for real Hamiltonians: a Hermitian X is stored as M = Re X + Im X
  // (symmetric plus antisymmetric part), on which L acts as
  // M -> M^T H - H M^T + D(M) with D the dissipator.
  bool has_real_form() const { return real_hamiltonian_; }
  void apply_real(const double* in, double* out) const;

  // Upper bound on the induced 1-norm.
  double norm_bound() const;

  Eigen::SparseMatrix<cd> materialize(int max_spins = 7) const;

 private:
  DenseOperator hamiltonian_;
  model::Continuous rates_;
  int n_spins_;
  Eigen::Index dim_;
  bool real_hamiltonian_;
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
  std::vector<cd> values_;
  std::vector<double> real_values_;
  std::vector<double> pump_diag_;  // -(gamma_e/2) * (#zero bits of a)
};

SuperOperator build_liouvillian(const DenseOperator& hamiltonian, const model::Continuous& rates);

enum class EvolveMethod { Auto, RungeKutta, Krylov };

struct EvolveOptions {
  EvolveMethod method = EvolveMethod::Auto;
  double rtol = 1e-9;
  double atol = 1e-11;
  double krylov_tol = 1e-11;
  int krylov_dimension = 30;
  // Auto uses Runge-Kutta up to this many spins and Krylov above.
  int runge_kutta_max_spins = 6;
};

/// Propagates an arbitrary operator x0 under exp(L t) and reports it at every
/// grid time (ascending, >= 0).
void propagate(const Eigen::MatrixXcd& x0, const SuperOperator& L, std::span<const double> times,
               const std::function<void(std::size_t, const Eigen::MatrixXcd&)>& observe,
               const EvolveOptions& opts = {});

/// Tr[A_j exp(L t_k)(x0)] indexed [k][j]; on the Krylov path intermediate
/// matrices are never formed.
std::vector<std::vector<cd>> propagate_expectations(const Eigen::MatrixXcd& x0, const SuperOperator& L,
                                                    std::span<const double> times,
                                                    std::span<const DenseOperator> observables,
                                                    const EvolveOptions& opts = {});

DenseState evolve(const DenseState& state, const SuperOperator& L, double t_final, const EvolveOptions& opts = {});

struct SolveInfo {
  std::string method;
  int iterations = 0;
  double residual = 0.0;  // |L rho| / |L|_F (factorized path) or |L rho| / |rho| (evolution path)
  bool converged = false;
  double horizon = 0.0;   // evolution time used by the evolution fallback
};

struct SteadyStateOptions {
  double shift = 1e-8;
  int max_iterations = 500;
  double tolerance = 1e-10;
  // Sparse LU is used up to this many spins; above, long-time evolution.
  int factorization_max_spins = 6;
  double evolve_horizon = 100.0;
  double evolve_chunk = 10.0;
  double evolve_residual_tol = 1e-7;
  std::uint64_t seed = 0x5eed;
  EvolveOptions evolve{};
};

struct DenseSteadyState {
  DenseState state;
  SolveInfo info;
};

DenseSteadyState steady_state_dense(const SuperOperator& L, const SteadyStateOptions& opts = {});

// Floquet dissipation: coherent step exp(-i H tau) followed by the product
// reset channel with Kraus operators sqrt(p)|1><1|, sqrt(p)|1><0|, sqrt(1-p) I.

std::vector<DenseOperator> floquet_kraus_operators(int n_spins, int site, double p);

class FloquetMap {
 public:
  FloquetMap(const DenseOperator& hamiltonian, double tau, double p);
  int n_spins() const { return n_spins_; }
  double tau() const { return tau_; }
  double p() const { return p_; }
  // x <- E(U x U^dagger)
  void apply(Eigen::MatrixXcd& x) const;
  // Only the reset channel.
  void apply_channel(Eigen::MatrixXcd& x) const;

 private:
  int n_spins_;
  double tau_;
  double p_;
  Eigen::MatrixXcd propagator_;
};

DenseState floquet_step_dense(const DenseState& state, const DenseOperator& hamiltonian, double tau, double p);

struct FloquetSolveOptions {
  double tol = 1e-10;  // trace distance |F(rho) - rho|
  int max_iterations = 5000;
  int restart = 80;
};

struct FloquetSteadyState {
  DenseState state;
  SolveInfo info;
};

FloquetSteadyState floquet_steady_state_dense(const DenseOperator& hamiltonian, double tau, double p,
                                             const FloquetSolveOptions& opts = {});

/// <A(t) B(0)> = Tr[A exp(L t)(B rho_s)] on an ascending grid.
std::vector<cd> two_time_correlation_dense(const DenseOperator& a, const DenseOperator& b, const DenseState& rho_s,
                                           const SuperOperator& L, std::span<const double> t_grid,
                                           const EvolveOptions& opts = {});

/// Stroboscopic analogue: <A(n tau) B(0)> = Tr[A F^n(B rho_s)] for the listed n.
std::vector<cd> two_time_correlation_floquet_dense(const DenseOperator& a, const DenseOperator& b,
                                                   const DenseState& rho_s, const FloquetMap& map,
                                                   std::span<const int> periods);

// Measurement protocols for Re / Im <S^a(t) sigma_i^b(0)>.

struct ProtocolOptions {
  long samples = 10000;
  std::uint64_t seed = 1;
  Axis collective_axis = Axis::X;  // S^a measured at time t
  Axis local_axis = Axis::Y;       // sigma_i^b at time 0
  EvolveOptions evolve{};
};

struct ProtocolPoint {
  double t = 0.0;
  double estimate = 0.0;        // Monte Carlo average
  double standard_error = 0.0;
  double exact = 0.0;           // exact branch / rotation value
  double raw_difference = 0.0;  // <S^a>_+ - <S^a>_- before any normalization
};

std::vector<ProtocolPoint> protocol_re(const DenseState& rho_s, const SuperOperator& L, int site,
                                       std::span<const double> t_grid, const ProtocolOptions& opts = {});

// Factor applied to <S^a>_+ - <S^a>_- to obtain Im <S^a(t) sigma_i^b(0)>.
inline constexpr double kImaginaryProtocolFactor = 0.5;

std::vector<ProtocolPoint> protocol_im(const DenseState& rho_s, const SuperOperator& L, int site,
                                       std::span<const double> t_grid, const ProtocolOptions& opts = {});

}  // namespace dissim::dense
