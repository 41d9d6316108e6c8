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

// Permutation-symmetric engine for all-to-all couplings (alpha = 0).
//
// Operators are expanded in the orthonormal basis B_n = c_n S_n, where S_n is
// the sum of all distinct Pauli strings with n = (nx, ny, nz, nI) factors of
// each kind and c_n = 1 / sqrt(M_n 2^N) with M_n the multinomial count of
// such strings. Every B_n is Hermitian, so physical states have real
// coefficients.

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dissim/dense.hpp"
#include "dissim/model.hpp"

namespace dissim::permsym {

using cd = std::complex<double>;
using dense::Axis;
using SparseMatrix = Eigen::SparseMatrix<cd>;

// Single-site Pauli labels in basis order.
enum Pauli : int { kX = 0, kY = 1, kZ = 2, kI = 3 };

struct Occupation {
  std::array<int, 4> n{};  // indexed by Pauli
  int operator[](int p) const { return n[static_cast<std::size_t>(p)]; }
  int& operator[](int p) { return n[static_cast<std::size_t>(p)]; }
  bool operator==(const Occupation&) const = default;
};

class PermBasis {
 public:
  explicit PermBasis(int n_spins);

  int n_spins() const { return n_spins_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(states_.size()); }
  const Occupation& state(Eigen::Index k) const { return states_[static_cast<std::size_t>(k)]; }
  // -1 if the occupation is not valid for this N.
  Eigen::Index index(const Occupation& occ) const;
  Eigen::Index index(int nx, int ny, int nz) const;
  Eigen::Index identity_index() const { return index(0, 0, 0); }

  // c_n, so that B_n = c_n S_n.
  double norm(Eigen::Index k) const { return norms_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& norms() const { return norms_; }

  // The parity P = prod Z_i maps B_n to (-1)^(nx + ny) B_n.
  bool even(Eigen::Index k) const { return ((state(k)[kX] + state(k)[kY]) & 1) == 0; }
  std::vector<Eigen::Index> sector(bool even_sector) const;

  // M_to / M_from computed as a product of small integers.
  static double multiplicity_ratio(const Occupation& from, const Occupation& to);

 private:
  int n_spins_;
  std::vector<Occupation> states_;
  std::vector<double> norms_;
  std::vector<Eigen::Index> lookup_;  // (nx, ny, nz) -> index
};

PermBasis enumerate_basis(int n_spins);

struct PermState {
  int n_spins = 0;
  Eigen::VectorXcd coeffs;

  cd trace(const PermBasis& basis) const;
  double imaginary_residue() const { return coeffs.imag().cwiseAbs().maxCoeff(); }
};

enum class MatrixKind { Liouvillian, FloquetMap, FloquetPropagator, LeftMultiplier };

/// Physical parameters a matrix was built from; doubles as its cache key.
struct MatrixParams {
  int n_spins = 0;
  double delta = 0.0;
  double j0 = 0.0;  // uniform pair coupling J_ij
  double gamma_e = 0.0;
  double gamma_d = 0.0;
  double tau = 0.0;
  double p = 0.0;
  int op_axis = -1;  // left multipliers: 0, 1, 2 for S^x, S^y, S^z
};

struct PermSuperMatrix {
  MatrixKind kind = MatrixKind::Liouvillian;
  MatrixParams params;
  SparseMatrix matrix;

  Eigen::Index size() const { return matrix.rows(); }
};

/// Eq.-of-motion generator restricted to the symmetric sector. Throws
/// UnsupportedError for alpha != 0.
PermSuperMatrix build_liouvillian_perm(const model::ModelSpec& spec, const model::Continuous& rates,
                                       const PermBasis& basis);

/// Generator for explicit parameters: H = (j0/2) sum_{i!=j} X_i X_j - delta sum_i Z_i.
PermSuperMatrix build_generator_perm(const PermBasis& basis, double delta, double j0, const model::Continuous& rates);

/// Product reset channel, built from the closed-form column expansion.
PermSuperMatrix floquet_map_perm(const PermBasis& basis, double p);

/// vec(S^a rho) = M vec(rho).
PermSuperMatrix left_multiplier_perm(Axis axis, const PermBasis& basis);

/// K = E exp(tau L_H), applied matrix-free (Krylov action of exp(tau L_H)).
class FloquetOperator {
 public:
  FloquetOperator(PermSuperMatrix l_h, PermSuperMatrix e, double tau);

  double tau() const { return tau_; }
  double p() const { return e_.params.p; }
  Eigen::Index size() const { return l_h_.size(); }
  const PermSuperMatrix& hamiltonian_generator() const { return l_h_; }
  const PermSuperMatrix& reset_map() const { return e_; }

  void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  void apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const;

  /// Explicit K; throws CapacityError when D exceeds max_dim or the dense
  /// fill would exceed budget_bytes (use apply() instead).
  PermSuperMatrix materialize(Eigen::Index max_dim = 30000, double budget_bytes = 512.0 * 1024 * 1024) const;

 private:
  PermSuperMatrix l_h_;
  PermSuperMatrix e_;
  double tau_;
  Eigen::SparseMatrix<double> l_h_real_;
  Eigen::SparseMatrix<double> e_real_;
  double norm_;
};

FloquetOperator floquet_propagator_perm(const PermSuperMatrix& l_h, const PermSuperMatrix& e, double tau);

struct SolveInfo {
  std::string method;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::optional<double> second_eigenvalue;  // |lambda_2| estimate (Floquet)
  bool slow_mixing = false;
};

struct SteadyStateOptions {
  double shift = 1e-8;
  int max_iterations = 500;
  double tolerance = 1e-9;  // |L v| <= tolerance |v|
  std::uint64_t seed = 0x5eed;
};

struct PermSteadyState {
  PermState state;
  SolveInfo info;
};

PermSteadyState steady_state_perm(const PermSuperMatrix& L, const PermBasis& basis, const SteadyStateOptions& opts = {});

struct FloquetSolveOptions {
  double tolerance = 1e-9;  // |K v - v| <= tolerance |v|
  int max_iterations = 3000;
  int restart = 60;
  int spectral_steps = 20;  // Arnoldi steps for the |lambda_2| estimate, 0 to skip
  std::uint64_t seed = 0x5eed;
};

PermSteadyState steady_state_floquet_perm(const FloquetOperator& K, const PermBasis& basis,
                                          const FloquetSolveOptions& opts = {});

// Linear functionals f with Tr(O rho) = f . coeffs.

/// O given by its expansion O = sum_n o_n S_n over unnormalized string sums.
Eigen::VectorXd string_functional(const PermBasis& basis, std::span<const std::pair<Occupation, double>> expansion);
Eigen::VectorXd trace_functional(const PermBasis& basis);
Eigen::VectorXd collective_functional(const PermBasis& basis, Axis axis);
// (S^x)^2 = N I + 2 S_(2,0,0,N-2)
Eigen::VectorXd collective_square_functional(const PermBasis& basis, Axis axis);

cd expectation(const Eigen::VectorXd& functional, const PermState& state);
double order_parameter(const PermState& state, const PermBasis& basis);

/// <A(t) B(0)> = Tr[A exp(L t)(B rho_s)] for collective A, B.
std::vector<cd> two_time_correlation_perm(Axis a, Axis b, const PermState& rho_s, const PermSuperMatrix& L,
                                          const PermBasis& basis, std::span<const double> t_grid);

/// Stroboscopic version; every grid time must be an integer multiple of tau.
std::vector<cd> two_time_correlation_floquet_perm(Axis a, Axis b, const PermState& rho_s, const FloquetOperator& K,
                                                  const PermBasis& basis, std::span<const double> t_grid);

// Dense embedding, for validation at small N.

/// B_k as a 2^N x 2^N matrix.
Eigen::MatrixXcd embed_basis_element(const PermBasis& basis, Eigen::Index k);
dense::DenseState to_dense(const PermState& state, const PermBasis& basis);
/// Coefficients <B_k, x> of the symmetric part of a dense operator.
Eigen::VectorXcd project(const Eigen::MatrixXcd& x, const PermBasis& basis);
/// P_mn = Tr(B_m^dagger S(B_n)) for a superoperator given by its action.
Eigen::MatrixXcd project_superoperator(const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& action,
                                       const PermBasis& basis);

// Optional on-disk cache of built matrices.

/// Binary little-endian triplet stream (versioned header, then per entry
/// int64 row, int64 col, float64 re, float64 im) with a JSON metadata sidecar.
void save_matrix(const std::filesystem::path& path, const PermSuperMatrix& m);
PermSuperMatrix load_matrix(const std::filesystem::path& path);

class MatrixCache {
 public:
  explicit MatrixCache(std::filesystem::path directory);
  PermSuperMatrix get_or_build(MatrixKind kind, const MatrixParams& params,
                               const std::function<PermSuperMatrix()>& build);
  std::filesystem::path path_for(MatrixKind kind, const MatrixParams& params) const;

 private:
  std::filesystem::path directory_;
};

}  // namespace dissim::permsym
