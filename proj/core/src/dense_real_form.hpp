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

// Real, parity-blocked representation of the Liouvillian for real Hamiltonians.
//
// A Hermitian X is stored as M = Re X + Im X. Both H and the dissipator commute
// with the global parity P = prod_i Z_i in the sense that entries X(a, b) with
// parity(a) == parity(b) never mix with the others, so M splits into two
// sectors of two (2^(N-1) x 2^(N-1)) blocks each.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "dissim/dense.hpp"

namespace dissim::dense::detail {

enum class Sector { SameParity, MixedParity };

class RealSectorOperator {
 public:
  RealSectorOperator(const SuperOperator& L, Sector sector);

  Eigen::Index size() const { return 2 * half_ * half_; }
  Sector sector() const { return sector_; }

  void apply(const double* in, double* out) const;

  // Packs the sector part of the Hermitian matrix x.
  void pack(const Eigen::MatrixXcd& x, Eigen::VectorXd& v) const;
  // x += coeff * (Hermitian matrix represented by v).
  void unpack_add(const Eigen::VectorXd& v, cd coeff, Eigen::MatrixXcd& x) const;
  // Real vectors (re, im) with Tr(A X) = re . v + i im . v for X represented by v.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> functional(const DenseOperator& a) const;
  // Offset of entry (a, b) in the packed vector, or -1 outside this sector.
  Eigen::Index position(Eigen::Index a, Eigen::Index b) const;

 private:
  struct Block {
    int rows;  // parity class of rows
    int cols;  // parity class of columns
  };
  struct Csr {
    std::vector<int> row_ptr;
    std::vector<int> cols;
    std::vector<double> vals;
  };

  int n_spins_;
  Eigen::Index half_;
  Sector sector_;
  double gamma_e_;
  double gamma_d_;
  std::array<Block, 2> blocks_;
  std::array<std::vector<int>, 2> global_;      // local index -> basis index, per parity class
  std::vector<int> local_;                      // basis index -> local index within its class
  std::array<Csr, 2> h_;                        // Hamiltonian block of each class, local indices
  std::array<std::vector<double>, 2> pump_;     // -(gamma_e / 2) * (#zero bits), per class
  // For class c and site i: (local index with bit i set, local index of the partner with bit i cleared).
  std::array<std::vector<std::vector<std::pair<int, int>>>, 2> jump_pairs_;
};

}  // namespace dissim::dense::detail
