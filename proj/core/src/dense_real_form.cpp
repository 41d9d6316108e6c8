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
#include "dense_real_form.hpp"

#include <bit>

#include "dissim/error.hpp"

namespace dissim::dense::detail {

namespace {

int parity(Eigen::Index a) { return std::popcount(static_cast<std::uint64_t>(a)) & 1; }

// y(:, b) += sum_k H(b, k) x(:, k) for symmetric H, i.e. y += x H.
template <typename Csr>
void right_multiply(const Csr& h, Eigen::Index n, const double* x, double* y) {
  for (Eigen::Index b = 0; b < n; ++b) {
    Eigen::Map<Eigen::VectorXd> yb(y + b * n, n);
    for (int k = h.row_ptr[b]; k < h.row_ptr[b + 1]; ++k)
      yb.noalias() += h.vals[k] * Eigen::Map<const Eigen::VectorXd>(x + static_cast<Eigen::Index>(h.cols[k]) * n, n);
  }
}

}  // namespace

RealSectorOperator::RealSectorOperator(const SuperOperator& L, Sector sector)
    : n_spins_(L.n_spins()), sector_(sector), gamma_e_(L.rates().gamma_e), gamma_d_(L.rates().gamma_d) {
  if (!L.has_real_form()) throw UnsupportedError("parity-blocked real form requires a real Hamiltonian");
  if (n_spins_ < 1) throw ArgumentError("empty system");
  const Eigen::Index n = L.hilbert_dim();
  half_ = n / 2;
  blocks_ = sector == Sector::SameParity ? std::array<Block, 2>{Block{0, 0}, Block{1, 1}}
                                         : std::array<Block, 2>{Block{0, 1}, Block{1, 0}};

  local_.resize(static_cast<std::size_t>(n));
  for (Eigen::Index a = 0; a < n; ++a) {
    auto& g = global_[parity(a)];
    local_[a] = static_cast<int>(g.size());
    g.push_back(static_cast<int>(a));
  }

  const SparseOp& hm = L.hamiltonian().matrix;
  for (int c = 0; c < 2; ++c) {
    Csr& h = h_[c];
    h.row_ptr.assign(1, 0);
    for (int la = 0; la < half_; ++la) {
      for (SparseOp::InnerIterator it(hm, global_[c][la]); it; ++it) {
        if (parity(it.col()) != c) throw UnsupportedError("Hamiltonian does not conserve parity");
        h.cols.push_back(local_[it.col()]);
        h.vals.push_back(it.value().real());
      }
      h.row_ptr.push_back(static_cast<int>(h.cols.size()));
    }
    pump_[c].resize(static_cast<std::size_t>(half_));
    for (int la = 0; la < half_; ++la)
      pump_[c][la] = -0.5 * gamma_e_ * (n_spins_ - std::popcount(static_cast<unsigned>(global_[c][la])));
    jump_pairs_[c].resize(static_cast<std::size_t>(n_spins_));
    for (int i = 0; i < n_spins_; ++i)
      for (int la = 0; la < half_; ++la) {
        const int a = global_[c][la];
        if (a & (1 << i)) jump_pairs_[c][i].emplace_back(la, local_[a ^ (1 << i)]);
      }
  }
}

void RealSectorOperator::apply(const double* in, double* out) const {
  const Eigen::Index h = half_;
  const Eigen::Index bsize = h * h;
  thread_local Eigen::MatrixXd work;
  work.resize(h, h);
  for (int k = 0; k < 2; ++k) {
    const Block blk = blocks_[k];
    // Transpose partner of block k: the block stored at (cols, rows).
    const int partner = sector_ == Sector::SameParity ? k : 1 - k;
    const double* bp = in + partner * bsize;
    const double* bk = in + k * bsize;
    double* yk = out + k * bsize;
    Eigen::Map<Eigen::MatrixXd> y(yk, h, h);

    // B_P^T H_cols
    work = Eigen::Map<const Eigen::MatrixXd>(bp, h, h).transpose();
    y.setZero();
    right_multiply(h_[blk.cols], h, work.data(), yk);
    // - (B_P H_rows)^T
    work.setZero();
    right_multiply(h_[blk.rows], h, bp, work.data());
    y -= work.transpose();

    const auto& gr = global_[blk.rows];
    const auto& gc = global_[blk.cols];
    const auto& pr = pump_[blk.rows];
    const auto& pc = pump_[blk.cols];
    const double dephase = -0.5 * gamma_d_;
    for (Eigen::Index lb = 0; lb < h; ++lb) {
      const int b = gc[lb];
      const double* src = bk + lb * h;
      double* dst = yk + lb * h;
      for (Eigen::Index la = 0; la < h; ++la)
        dst[la] += (pr[la] + pc[lb] + dephase * std::popcount(static_cast<unsigned>(gr[la] ^ b))) * src[la];
    }

    if (gamma_e_ != 0.0) {
      const double* other = in + (1 - k) * bsize;
      for (int i = 0; i < n_spins_; ++i) {
        for (const auto& [lb, lbp] : jump_pairs_[blk.cols][i]) {
          const double* src = other + static_cast<Eigen::Index>(lbp) * h;
          double* dst = yk + static_cast<Eigen::Index>(lb) * h;
          for (const auto& [la, lap] : jump_pairs_[blk.rows][i]) dst[la] += gamma_e_ * src[lap];
        }
      }
    }
  }
}

void RealSectorOperator::pack(const Eigen::MatrixXcd& x, Eigen::VectorXd& v) const {
  const Eigen::Index h = half_;
  v.resize(size());
  for (int k = 0; k < 2; ++k) {
    const auto& gr = global_[blocks_[k].rows];
    const auto& gc = global_[blocks_[k].cols];
    double* dst = v.data() + k * h * h;
    for (Eigen::Index lb = 0; lb < h; ++lb)
      for (Eigen::Index la = 0; la < h; ++la) {
        const cd z = x(gr[la], gc[lb]);
        dst[la + lb * h] = z.real() + z.imag();
      }
  }
}

void RealSectorOperator::unpack_add(const Eigen::VectorXd& v, cd coeff, Eigen::MatrixXcd& x) const {
  const Eigen::Index h = half_;
  for (int k = 0; k < 2; ++k) {
    const int partner = sector_ == Sector::SameParity ? k : 1 - k;
    const auto& gr = global_[blocks_[k].rows];
    const auto& gc = global_[blocks_[k].cols];
    const double* bk = v.data() + k * h * h;
    const double* bp = v.data() + partner * h * h;
    for (Eigen::Index lb = 0; lb < h; ++lb)
      for (Eigen::Index la = 0; la < h; ++la) {
        const double m_ab = bk[la + lb * h];
        const double m_ba = bp[lb + la * h];
        x(gr[la], gc[lb]) += coeff * cd(0.5 * (m_ab + m_ba), 0.5 * (m_ab - m_ba));
      }
  }
}

Eigen::Index RealSectorOperator::position(Eigen::Index a, Eigen::Index b) const {
  const int r = parity(a), c = parity(b);
  for (int k = 0; k < 2; ++k)
    if (blocks_[k].rows == r && blocks_[k].cols == c) return k * half_ * half_ + local_[a] + local_[b] * half_;
  return -1;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> RealSectorOperator::functional(const DenseOperator& a) const {
  // X(a, b) = M(a, b) (1 + i) / 2 + M(b, a) (1 - i) / 2 and Tr(A X) = sum A(b, a) X(a, b).
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(size());
  const cd plus(0.5, 0.5), minus(0.5, -0.5);
  for (Eigen::Index r = 0; r < a.matrix.outerSize(); ++r)
    for (SparseOp::InnerIterator it(a.matrix, r); it; ++it) {
      const Eigen::Index c = it.col();
      if (const Eigen::Index p = position(c, r); p >= 0) w(p) += it.value() * plus;
      if (const Eigen::Index p = position(r, c); p >= 0) w(p) += it.value() * minus;
    }
  return {w.real(), w.imag()};
}

}  // namespace dissim::dense::detail
