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
#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dissim/dense.hpp"
#include "dissim/error.hpp"

namespace dissim::dense {

namespace {

void check_site(int n_spins, int site) {
  if (n_spins < 1 || n_spins > 30) throw ArgumentError("n_spins out of range");
  if (site < 0 || site >= n_spins) throw ArgumentError("site index out of range: " + std::to_string(site));
}

SparseOp from_triplets(Eigen::Index dim, const std::vector<Eigen::Triplet<cd>>& triplets) {
  SparseOp m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

double DenseOperator::hermiticity_error() const {
  SparseOp diff = matrix - SparseOp(matrix.adjoint());
  return diff.norm();
}

DenseOperator identity(int n_spins) {
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  SparseOp m(dim, dim);
  m.setIdentity();
  return {n_spins, m};
}

DenseOperator pauli(int n_spins, int site, Axis axis) {
  check_site(n_spins, site);
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  const Eigen::Index mask = Eigen::Index{1} << site;
  std::vector<Eigen::Triplet<cd>> t;
  t.reserve(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const bool one = (a & mask) != 0;
    switch (axis) {
      case Axis::X:
        t.emplace_back(a ^ mask, a, 1.0);
        break;
      case Axis::Y:
        // Y|0> = i|1>, Y|1> = -i|0>
        t.emplace_back(a ^ mask, a, one ? cd(0, -1) : cd(0, 1));
        break;
      case Axis::Z:
        t.emplace_back(a, a, one ? -1.0 : 1.0);
        break;
    }
  }
  return {n_spins, from_triplets(dim, t)};
}

DenseOperator collective(int n_spins, Axis axis) {
  DenseOperator sum = pauli(n_spins, 0, axis);
  for (int i = 1; i < n_spins; ++i) sum.matrix += pauli(n_spins, i, axis).matrix;
  sum.matrix.makeCompressed();
  return sum;
}

DenseState DenseState::maximally_mixed(int n_spins) {
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  return {n_spins, Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim)};
}

DenseState DenseState::all_pumped(int n_spins) {
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(dim - 1, dim - 1) = 1.0;
  return {n_spins, rho};
}

double DenseState::min_eigenvalue() const {
  Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

void DenseState::validate(double trace_tol, double herm_tol, double min_eig) const {
  const cd tr = trace();
  if (std::abs(tr - 1.0) > trace_tol) throw ArgumentError("state trace deviates from 1 by " + std::to_string(std::abs(tr - 1.0)));
  const double herm = hermiticity_error();
  if (herm > herm_tol) throw ArgumentError("state is not Hermitian, error " + std::to_string(herm));
  const double lo = min_eigenvalue();
  if (lo < min_eig) throw ArgumentError("state has negative eigenvalue " + std::to_string(lo));
}

cd expectation(const DenseOperator& op, const Eigen::MatrixXcd& x) {
  // Tr(A X) = sum_{a,k} A(a,k) X(k,a)
  cd acc = 0.0;
  for (Eigen::Index a = 0; a < op.matrix.outerSize(); ++a)
    for (SparseOp::InnerIterator it(op.matrix, a); it; ++it) acc += it.value() * x(it.col(), a);
  return acc;
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd diff = a - b;
  diff = 0.5 * (diff + diff.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DenseOperator build_hamiltonian(const model::ModelSpec& spec, const model::CouplingMatrix& couplings, int max_spins) {
  spec.validate();
  const int n = spec.n_spins;
  if (n > max_spins)
    throw CapacityError("dense engine capped at " + std::to_string(max_spins) + " spins, requested " + std::to_string(n));
  if (couplings.size() != n) throw ArgumentError("coupling matrix size does not match n_spins");

  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<Eigen::Triplet<cd>> t;
  t.reserve(static_cast<std::size_t>(dim) * (static_cast<std::size_t>(n * (n - 1) / 2) + 1));
  for (Eigen::Index a = 0; a < dim; ++a) {
    const int ones = std::popcount(static_cast<std::uint64_t>(a));
    const double field = -spec.delta * static_cast<double>(n - 2 * ones);
    if (field != 0.0) t.emplace_back(a, a, field);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double jij = couplings.entries(i, j);
        if (jij != 0.0) t.emplace_back(a, a ^ ((Eigen::Index{1} << i) | (Eigen::Index{1} << j)), jij);
      }
  }
  return {n, from_triplets(dim, t)};
}

}  // namespace dissim::dense
