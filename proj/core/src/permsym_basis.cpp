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
#include <cmath>
#include <numbers>
#include <string>

#include "dissim/error.hpp"
#include "dissim/permsym.hpp"

namespace dissim::permsym {

namespace {

// A Pauli string over N sites with the site i <-> bit i convention.
struct PauliString {
  std::vector<int> ops;
  Eigen::Index flip = 0;  // sites carrying X or Y

  // s |b> = phase(b) |b ^ flip>
  cd phase(Eigen::Index b) const {
    cd ph = 1.0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const bool one = (b >> i) & 1;
      switch (ops[i]) {
        case kY:
          ph *= one ? cd(0, -1) : cd(0, 1);
          break;
        case kZ:
          if (one) ph = -ph;
          break;
        default:
          break;
      }
    }
    return ph;
  }
};

constexpr int kMaxEmbedSpins = 8;

// Visits every Pauli string of N sites together with its basis index.
template <typename Visit>
void for_each_string(const PermBasis& basis, Visit&& visit) {
  const int n = basis.n_spins();
  if (n > kMaxEmbedSpins) throw CapacityError("dense embedding limited to " + std::to_string(kMaxEmbedSpins) + " spins");
  const Eigen::Index total = Eigen::Index{1} << (2 * n);
  PauliString s;
  s.ops.resize(static_cast<std::size_t>(n));
  for (Eigen::Index code = 0; code < total; ++code) {
    Occupation occ;
    s.flip = 0;
    for (int i = 0; i < n; ++i) {
      const int op = static_cast<int>((code >> (2 * i)) & 3);
      s.ops[static_cast<std::size_t>(i)] = op;
      ++occ[op];
      if (op == kX || op == kY) s.flip |= Eigen::Index{1} << i;
    }
    visit(s, basis.index(occ));
  }
}

}  // namespace

PermBasis::PermBasis(int n_spins) : n_spins_(n_spins) {
  if (n_spins < 1) throw ArgumentError("n_spins must be >= 1");
  const auto side = static_cast<std::size_t>(n_spins + 1);
  lookup_.assign(side * side * side, -1);
  const double log_total = std::lgamma(n_spins + 1.0) + n_spins * std::numbers::ln2;
  for (int nx = 0; nx <= n_spins; ++nx)
    for (int ny = 0; ny <= n_spins - nx; ++ny)
      for (int nz = 0; nz <= n_spins - nx - ny; ++nz) {
        Occupation occ;
        occ.n = {nx, ny, nz, n_spins - nx - ny - nz};
        lookup_[(static_cast<std::size_t>(nx) * side + ny) * side + nz] = static_cast<Eigen::Index>(states_.size());
        states_.push_back(occ);
        double log_m = log_total;
        for (int a = 0; a < 4; ++a) log_m -= std::lgamma(occ[a] + 1.0);
        norms_.push_back(std::exp(-0.5 * log_m));
      }
}

Eigen::Index PermBasis::index(int nx, int ny, int nz) const {
  if (nx < 0 || ny < 0 || nz < 0 || nx + ny + nz > n_spins_) return -1;
  const auto side = static_cast<std::size_t>(n_spins_ + 1);
  return lookup_[(static_cast<std::size_t>(nx) * side + ny) * side + nz];
}

Eigen::Index PermBasis::index(const Occupation& occ) const {
  if (occ[kI] < 0 || occ[kX] + occ[kY] + occ[kZ] + occ[kI] != n_spins_) return -1;
  return index(occ[kX], occ[kY], occ[kZ]);
}

std::vector<Eigen::Index> PermBasis::sector(bool even_sector) const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index k = 0; k < size(); ++k)
    if (even(k) == even_sector) out.push_back(k);
  return out;
}

double PermBasis::multiplicity_ratio(const Occupation& from, const Occupation& to) {
  double r = 1.0;
  for (int a = 0; a < 4; ++a) {
    for (int k = from[a] + 1; k <= to[a]; ++k) r /= k;
    for (int k = to[a] + 1; k <= from[a]; ++k) r *= k;
  }
  return r;
}

PermBasis enumerate_basis(int n_spins) { return PermBasis(n_spins); }

cd PermState::trace(const PermBasis& basis) const {
  return coeffs(basis.identity_index()) / basis.norm(basis.identity_index());
}

Eigen::VectorXd string_functional(const PermBasis& basis, std::span<const std::pair<Occupation, double>> expansion) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(basis.size());
  for (const auto& [occ, value] : expansion) {
    const Eigen::Index k = basis.index(occ);
    if (k < 0) throw ArgumentError("string class does not match the basis size");
    f(k) += value / basis.norm(k);
  }
  return f;
}

Eigen::VectorXd trace_functional(const PermBasis& basis) {
  Occupation id;
  id[kI] = basis.n_spins();
  const std::pair<Occupation, double> terms[] = {{id, 1.0}};
  return string_functional(basis, terms);
}

Eigen::VectorXd collective_functional(const PermBasis& basis, Axis axis) {
  Occupation occ;
  occ[static_cast<int>(axis)] = 1;
  occ[kI] = basis.n_spins() - 1;
  const std::pair<Occupation, double> terms[] = {{occ, 1.0}};
  return string_functional(basis, terms);
}

Eigen::VectorXd collective_square_functional(const PermBasis& basis, Axis axis) {
  const int n = basis.n_spins();
  std::vector<std::pair<Occupation, double>> terms;
  Occupation id;
  id[kI] = n;
  terms.emplace_back(id, static_cast<double>(n));
  if (n >= 2) {
    Occupation pair;
    pair[static_cast<int>(axis)] = 2;
    pair[kI] = n - 2;
    terms.emplace_back(pair, 2.0);
  }
  return string_functional(basis, terms);
}

cd expectation(const Eigen::VectorXd& functional, const PermState& state) {
  return functional.cast<cd>().dot(state.coeffs);  // real weights, conjugation is harmless
}

double order_parameter(const PermState& state, const PermBasis& basis) {
  const double n = basis.n_spins();
  return expectation(collective_square_functional(basis, Axis::X), state).real() / (n * n);
}

Eigen::MatrixXcd embed_basis_element(const PermBasis& basis, Eigen::Index k) {
  const Eigen::Index dim = Eigen::Index{1} << basis.n_spins();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  const double c = basis.norm(k);
  for_each_string(basis, [&](const PauliString& s, Eigen::Index cls) {
    if (cls != k) return;
    for (Eigen::Index b = 0; b < dim; ++b) out(b ^ s.flip, b) += c * s.phase(b);
  });
  return out;
}

dense::DenseState to_dense(const PermState& state, const PermBasis& basis) {
  const Eigen::Index dim = Eigen::Index{1} << basis.n_spins();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for_each_string(basis, [&](const PauliString& s, Eigen::Index cls) {
    const cd w = state.coeffs(cls) * basis.norm(cls);
    if (w == 0.0) return;
    for (Eigen::Index b = 0; b < dim; ++b) out(b ^ s.flip, b) += w * s.phase(b);
  });
  return {basis.n_spins(), out};
}

Eigen::VectorXcd project(const Eigen::MatrixXcd& x, const PermBasis& basis) {
  const Eigen::Index dim = Eigen::Index{1} << basis.n_spins();
  if (x.rows() != dim || x.cols() != dim) throw ArgumentError("operator dimension does not match the basis");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.size());
  for_each_string(basis, [&](const PauliString& s, Eigen::Index cls) {
    // Tr(s^dagger x) = sum_b conj(<b ^ flip| s |b>) x(b ^ flip, b)
    cd acc = 0.0;
    for (Eigen::Index b = 0; b < dim; ++b) acc += std::conj(s.phase(b)) * x(b ^ s.flip, b);
    v(cls) += basis.norm(cls) * acc;
  });
  return v;
}

Eigen::MatrixXcd project_superoperator(const std::function<Eigen::MatrixXcd(const Eigen::MatrixXcd&)>& action,
                                       const PermBasis& basis) {
  Eigen::MatrixXcd out(basis.size(), basis.size());
  for (Eigen::Index k = 0; k < basis.size(); ++k) out.col(k) = project(action(embed_basis_element(basis, k)), basis);
  return out;
}

}  // namespace dissim::permsym
