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
#include <bit>
#include <cmath>
#include <string>
#include <vector>

#include "dissim/dense.hpp"
#include "dissim/error.hpp"

namespace dissim::dense {

SuperOperator::SuperOperator(DenseOperator hamiltonian, model::Continuous rates)
    : hamiltonian_(std::move(hamiltonian)), rates_(rates), n_spins_(hamiltonian_.n_spins) {
  model::validate(rates_);
  dim_ = hamiltonian_.matrix.rows();
  if (hamiltonian_.matrix.cols() != dim_ || dim_ != (Eigen::Index{1} << n_spins_))
    throw ArgumentError("Hamiltonian dimension does not match 2^n_spins");

  SparseOp& h = hamiltonian_.matrix;
  h.makeCompressed();
  row_ptr_.assign(h.outerIndexPtr(), h.outerIndexPtr() + dim_ + 1);
  cols_.assign(h.innerIndexPtr(), h.innerIndexPtr() + h.nonZeros());
  values_.assign(h.valuePtr(), h.valuePtr() + h.nonZeros());
  real_hamiltonian_ = std::all_of(values_.begin(), values_.end(), [](const cd& v) { return v.imag() == 0.0; });
  real_values_.resize(values_.size());
  std::transform(values_.begin(), values_.end(), real_values_.begin(), [](const cd& v) { return v.real(); });

  pump_diag_.resize(static_cast<std::size_t>(dim_));
  for (Eigen::Index a = 0; a < dim_; ++a) {
    const int zeros = n_spins_ - std::popcount(static_cast<std::uint64_t>(a));
    pump_diag_[static_cast<std::size_t>(a)] = -0.5 * rates_.gamma_e * zeros;
  }
}

namespace {

template <typename Value>
void apply_kernel(Eigen::Index n, int n_spins, const int* row_ptr, const int* cols, const Value* vals,
                  const double* pump_diag, double gamma_e, double gamma_d, const cd* x, cd* y) {
  const double dephase = -0.5 * gamma_d;  // per site where row and column bits differ
  for (Eigen::Index b = 0; b < n; ++b) {
    const cd* xb = x + b * n;
    cd* yb = y + b * n;
    const double db = pump_diag[b];

    // -i H x_b plus the diagonal dissipative part
    for (Eigen::Index a = 0; a < n; ++a) {
      cd acc = 0.0;
      for (int k = row_ptr[a]; k < row_ptr[a + 1]; ++k) acc += vals[k] * xb[cols[k]];
      const double d = pump_diag[a] + db + dephase * std::popcount(static_cast<std::uint64_t>(a ^ b));
      yb[a] = cd(acc.imag(), -acc.real()) + d * xb[a];
    }

    // +i (x H)(:, b) = i sum_k x(:, k) conj(H(b, k))
    Eigen::Map<Eigen::VectorXcd> ycol(yb, n);
    for (int k = row_ptr[b]; k < row_ptr[b + 1]; ++k) {
      const cd c = cd(0.0, 1.0) * std::conj(cd(vals[k]));
      ycol.noalias() += c * Eigen::Map<const Eigen::VectorXcd>(x + static_cast<Eigen::Index>(cols[k]) * n, n);
    }

    // gamma_e sigma_i^- x sigma_i^+ : needs bit i set in both row and column
    if (gamma_e != 0.0) {
      for (int i = 0; i < n_spins; ++i) {
        const Eigen::Index m = Eigen::Index{1} << i;
        if ((b & m) == 0) continue;
        const cd* xp = x + (b ^ m) * n;
        for (Eigen::Index hi = m; hi < n; hi += 2 * m)
          for (Eigen::Index a = hi; a < hi + m; ++a) yb[a] += gamma_e * xp[a - m];
      }
    }
  }
}

void apply_real_kernel(Eigen::Index n, int n_spins, const int* row_ptr, const int* cols, const double* vals,
                       const double* pump_diag, double gamma_e, double gamma_d, const double* m, double* y) {
  thread_local Eigen::MatrixXd transposed;
  transposed = Eigen::Map<const Eigen::MatrixXd>(m, n, n).transpose();
  const double* tr = transposed.data();
  const double dephase = -0.5 * gamma_d;
  for (Eigen::Index b = 0; b < n; ++b) {
    const double* tb = tr + b * n;
    const double* mb = m + b * n;
    double* yb = y + b * n;
    const double db = pump_diag[b];

    // -(H T)(:, b) plus the diagonal dissipative part
    for (Eigen::Index a = 0; a < n; ++a) {
      double acc = 0.0;
      for (int k = row_ptr[a]; k < row_ptr[a + 1]; ++k) acc += vals[k] * tb[cols[k]];
      const double d = pump_diag[a] + db + dephase * std::popcount(static_cast<std::uint64_t>(a ^ b));
      yb[a] = d * mb[a] - acc;
    }

    // +(T H)(:, b) = sum_k H(b, k) T(:, k)
    Eigen::Map<Eigen::VectorXd> ycol(yb, n);
    for (int k = row_ptr[b]; k < row_ptr[b + 1]; ++k)
      ycol.noalias() += vals[k] * Eigen::Map<const Eigen::VectorXd>(tr + static_cast<Eigen::Index>(cols[k]) * n, n);

    if (gamma_e != 0.0) {
      for (int i = 0; i < n_spins; ++i) {
        const Eigen::Index mask = Eigen::Index{1} << i;
        if ((b & mask) == 0) continue;
        const double* mp = m + (b ^ mask) * n;
        for (Eigen::Index hi = mask; hi < n; hi += 2 * mask)
          for (Eigen::Index a = hi; a < hi + mask; ++a) yb[a] += gamma_e * mp[a - mask];
      }
    }
  }
}

}  // namespace

void SuperOperator::apply_real(const double* in, double* out) const {
  if (!real_hamiltonian_) throw UnsupportedError("real form requires a real Hamiltonian");
  apply_real_kernel(dim_, n_spins_, row_ptr_.data(), cols_.data(), real_values_.data(), pump_diag_.data(),
                    rates_.gamma_e, rates_.gamma_d, in, out);
}

void SuperOperator::apply(const cd* in, cd* out) const {
  if (real_hamiltonian_) {
    apply_kernel(dim_, n_spins_, row_ptr_.data(), cols_.data(), real_values_.data(), pump_diag_.data(),
                 rates_.gamma_e, rates_.gamma_d, in, out);
  } else {
    apply_kernel(dim_, n_spins_, row_ptr_.data(), cols_.data(), values_.data(), pump_diag_.data(), rates_.gamma_e,
                 rates_.gamma_d, in, out);
  }
}

void SuperOperator::apply(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) const {
  if (in.rows() != dim_ || in.cols() != dim_) throw ArgumentError("operand dimension mismatch");
  out.resize(dim_, dim_);
  apply(in.data(), out.data());
}

void SuperOperator::apply_vec(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  if (in.size() != dim()) throw ArgumentError("operand dimension mismatch");
  out.resize(dim());
  apply(in.data(), out.data());
}

double SuperOperator::norm_bound() const {
  double hmax = 0.0;
  for (Eigen::Index a = 0; a < dim_; ++a) {
    double row = 0.0;
    for (int k = row_ptr_[a]; k < row_ptr_[a + 1]; ++k) row += std::abs(values_[k]);
    hmax = std::max(hmax, row);
  }
  return 2.0 * hmax + n_spins_ * (2.0 * rates_.gamma_e + 0.5 * rates_.gamma_d);
}

Eigen::SparseMatrix<cd> SuperOperator::materialize(int max_spins) const {
  if (n_spins_ > max_spins)
    throw CapacityError("refusing to materialize a " + std::to_string(dim()) + "-dimensional superoperator");
  const Eigen::Index n = dim_;
  const double dephase = -0.5 * rates_.gamma_d;
  std::vector<Eigen::Triplet<cd>> t;
  t.reserve(static_cast<std::size_t>(dim()) * (2 * (values_.size() / std::max<Eigen::Index>(n, 1)) + 2 + n_spins_));
  for (Eigen::Index b = 0; b < n; ++b) {
    for (Eigen::Index a = 0; a < n; ++a) {
      const Eigen::Index col = a + b * n;
      // -i H x: x(a,b) feeds y(r,b) with H(r,a) = conj(H(a,r))
      for (int k = row_ptr_[a]; k < row_ptr_[a + 1]; ++k)
        t.emplace_back(cols_[k] + b * n, col, cd(0.0, -1.0) * std::conj(values_[k]));
      // +i x H: x(a,b) feeds y(a,s) with H(b,s)
      for (int k = row_ptr_[b]; k < row_ptr_[b + 1]; ++k) t.emplace_back(a + cols_[k] * n, col, cd(0.0, 1.0) * values_[k]);
      const double d = pump_diag_[a] + pump_diag_[b] + dephase * std::popcount(static_cast<std::uint64_t>(a ^ b));
      if (d != 0.0) t.emplace_back(col, col, d);
      if (rates_.gamma_e != 0.0) {
        for (int i = 0; i < n_spins_; ++i) {
          const Eigen::Index m = Eigen::Index{1} << i;
          if ((a & m) || (b & m)) continue;
          t.emplace_back((a | m) + (b | m) * n, col, rates_.gamma_e);
        }
      }
    }
  }
  Eigen::SparseMatrix<cd> L(dim(), dim());
  L.setFromTriplets(t.begin(), t.end());
  L.makeCompressed();
  return L;
}

SuperOperator build_liouvillian(const DenseOperator& hamiltonian, const model::Continuous& rates) {
  return SuperOperator(hamiltonian, rates);
}

}  // namespace dissim::dense
