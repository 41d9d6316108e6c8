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
#include <string>

#include "dissim/error.hpp"
#include "dissim/numerics/krylov.hpp"
#include "dissim/permsym.hpp"

namespace dissim::permsym {

namespace {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

const std::array<Mat2, 4>& paulis() {
  static const std::array<Mat2, 4> p = [] {
    std::array<Mat2, 4> m;
    m[kX] << 0, 1, 1, 0;
    m[kY] << 0, cd(0, -1), cd(0, 1), 0;
    m[kZ] << 1, 0, 0, -1;
    m[kI] << 1, 0, 0, 1;
    return m;
  }();
  return p;
}

Mat4 kron(const Mat2& a, const Mat2& b) {
  Mat4 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

// F(b, a) = Tr(P_b f(P_a)) / 2 for a single-site superoperator f.
Eigen::Matrix4cd single_site_table(const std::function<Mat2(const Mat2&)>& f) {
  Eigen::Matrix4cd table;
  for (int a = 0; a < 4; ++a) {
    const Mat2 image = f(paulis()[a]);
    for (int b = 0; b < 4; ++b) table(b, a) = (paulis()[b] * image).trace() / 2.0;
  }
  return table;
}

// G(4c + d, 4a + b) = Tr((P_c x P_d) g(P_a x P_b)) / 4 for a two-site superoperator g.
Eigen::Matrix<cd, 16, 16> pair_table(const std::function<Mat4(const Mat4&)>& g) {
  Eigen::Matrix<cd, 16, 16> table;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const Mat4 image = g(kron(paulis()[a], paulis()[b]));
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          table(4 * c + d, 4 * a + b) = (kron(paulis()[c], paulis()[d]) * image).trace() / 4.0;
    }
  return table;
}

constexpr double kDropTolerance = 1e-15;

// Adds sum_i f_i, expanded through the string-class rewrite rule.
void add_single_site(const PermBasis& basis, const Eigen::Matrix4cd& table, std::vector<Eigen::Triplet<cd>>& out) {
  for (Eigen::Index k = 0; k < basis.size(); ++k) {
    const Occupation& n = basis.state(k);
    for (int a = 0; a < 4; ++a) {
      if (n[a] == 0) continue;
      for (int b = 0; b < 4; ++b) {
        const cd f = table(b, a);
        if (std::abs(f) < kDropTolerance) continue;
        Occupation np = n;
        --np[a];
        ++np[b];
        const double mult = a == b ? n[a] : np[b];
        out.emplace_back(basis.index(np), k, f * mult * std::sqrt(PermBasis::multiplicity_ratio(n, np)));
      }
    }
  }
}

// Adds sum_{i != j} g_ij over ordered site pairs.
void add_pair(const PermBasis& basis, const Eigen::Matrix<cd, 16, 16>& table, std::vector<Eigen::Triplet<cd>>& out) {
  for (Eigen::Index k = 0; k < basis.size(); ++k) {
    const Occupation& n = basis.state(k);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (n[a] == 0 || n[b] == 0 || (a == b && n[a] < 2)) continue;
        for (int c = 0; c < 4; ++c)
          for (int d = 0; d < 4; ++d) {
            const cd g = table(4 * c + d, 4 * a + b);
            if (std::abs(g) < kDropTolerance) continue;
            Occupation np = n;
            --np[a];
            --np[b];
            ++np[c];
            ++np[d];
            const double pairs = c == d ? static_cast<double>(np[c]) * (np[c] - 1) : static_cast<double>(np[c]) * np[d];
            if (pairs == 0.0) continue;
            out.emplace_back(basis.index(np), k, g * pairs * std::sqrt(PermBasis::multiplicity_ratio(n, np)));
          }
      }
  }
}

SparseMatrix assemble(const PermBasis& basis, std::vector<Eigen::Triplet<cd>>& triplets) {
  SparseMatrix m(basis.size(), basis.size());
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(cd(0.0), kDropTolerance);
  m.makeCompressed();
  return m;
}

Eigen::SparseMatrix<double> real_part(const SparseMatrix& m, const char* what) {
  Eigen::SparseMatrix<double> r = m.real();
  if (SparseMatrix(m - r.cast<cd>()).norm() > 1e-13 * std::max(1.0, r.norm()))
    throw UnsupportedError(std::string(what) + " is expected to be real");
  return r;
}

double one_norm(const Eigen::SparseMatrix<double>& m) {
  double best = 0.0;
  for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
    double s = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

PermSuperMatrix build_generator_perm(const PermBasis& basis, double delta, double j0, const model::Continuous& rates) {
  model::validate(rates);
  const Mat2& z = paulis()[kZ];
  const Mat2 lower = (Mat2() << 0, 0, 1, 0).finished();  // |1><0|
  const Mat2 raise = lower.adjoint();
  const Mat2 n0 = raise * lower;                         // |0><0|
  const double ge = rates.gamma_e, gd = rates.gamma_d;

  // -i[-delta Z, rho] + gamma_e (s- rho s+ - {n0, rho}/2) - (gamma_d / 4)(rho - Z rho Z)
  const auto single = single_site_table([&](const Mat2& r) -> Mat2 {
    Mat2 out = cd(0, 1) * delta * (z * r - r * z);
    out += ge * (lower * r * raise - 0.5 * (n0 * r + r * n0));
    out -= 0.25 * gd * (r - z * r * z);
    return out;
  });
  // H_XX = (j0 / 2) sum_{i != j} X_i X_j
  const Mat4 xx = kron(paulis()[kX], paulis()[kX]);
  const auto pair = pair_table([&](const Mat4& r) -> Mat4 { return cd(0, -0.5 * j0) * (xx * r - r * xx); });

  std::vector<Eigen::Triplet<cd>> t;
  add_single_site(basis, single, t);
  if (basis.n_spins() >= 2 && j0 != 0.0) add_pair(basis, pair, t);
  PermSuperMatrix m;
  m.kind = MatrixKind::Liouvillian;
  m.params = {basis.n_spins(), delta, j0, ge, gd, 0.0, 0.0, -1};
  m.matrix = assemble(basis, t);
  return m;
}

PermSuperMatrix build_liouvillian_perm(const model::ModelSpec& spec, const model::Continuous& rates,
                                       const PermBasis& basis) {
  spec.validate();
  if (spec.alpha != 0.0) throw UnsupportedError("permutation-symmetric engine requires alpha = 0");
  if (spec.n_spins != basis.n_spins()) throw ArgumentError("basis size does not match the model");
  const auto couplings = model::build_coupling_matrix(spec);
  const double j0 = spec.n_spins > 1 ? couplings.entries(0, 1) : 0.0;
  return build_generator_perm(basis, spec.delta, j0, rates);
}

PermSuperMatrix floquet_map_perm(const PermBasis& basis, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("reset probability must lie in [0, 1]");
  std::vector<Eigen::Triplet<cd>> t;
  for (Eigen::Index k = 0; k < basis.size(); ++k) {
    const Occupation& n = basis.state(k);
    const int nz = n[kZ], ni = n[kI];
    // Each identity factor maps to I - p Z, every other factor shrinks by (1 - p):
    // (1-p)^(nx+ny+nz) sum_k C(nI,k) (-p)^k sqrt(prod_{i<=k} (nz+i)/(nI-i+1)) B_(nx,ny,nz+k)
    double term = std::pow(1.0 - p, n[kX] + n[kY] + nz);
    for (int j = 0; j <= ni; ++j) {
      if (j > 0) term *= -p * (ni - j + 1.0) / j * std::sqrt((nz + j) / (ni - j + 1.0));
      if (term == 0.0) break;
      t.emplace_back(basis.index(n[kX], n[kY], nz + j), k, term);
    }
  }
  PermSuperMatrix m;
  m.kind = MatrixKind::FloquetMap;
  m.params.n_spins = basis.n_spins();
  m.params.p = p;
  m.matrix = assemble(basis, t);
  return m;
}

PermSuperMatrix left_multiplier_perm(Axis axis, const PermBasis& basis) {
  const Mat2& op = paulis()[static_cast<int>(axis)];
  const auto table = single_site_table([&](const Mat2& r) -> Mat2 { return op * r; });
  std::vector<Eigen::Triplet<cd>> t;
  add_single_site(basis, table, t);
  PermSuperMatrix m;
  m.kind = MatrixKind::LeftMultiplier;
  m.params.n_spins = basis.n_spins();
  m.params.op_axis = static_cast<int>(axis);
  m.matrix = assemble(basis, t);
  return m;
}

FloquetOperator::FloquetOperator(PermSuperMatrix l_h, PermSuperMatrix e, double tau)
    : l_h_(std::move(l_h)), e_(std::move(e)), tau_(tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ArgumentError("tau must be finite and >= 0");
  if (l_h_.kind != MatrixKind::Liouvillian || e_.kind != MatrixKind::FloquetMap)
    throw ArgumentError("Floquet propagator needs a Liouvillian and a reset map");
  if (l_h_.params.gamma_e != 0.0 || l_h_.params.gamma_d != 0.0)
    throw ArgumentError("Floquet propagator needs the dissipation-free generator");
  if (l_h_.size() != e_.size()) throw ArgumentError("generator and reset map sizes differ");
  l_h_real_ = real_part(l_h_.matrix, "Hamiltonian generator");
  e_real_ = real_part(e_.matrix, "reset map");
  norm_ = one_norm(l_h_real_);
}

void FloquetOperator::apply(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
  Eigen::VectorXd v = in;
  if (tau_ > 0.0) {
    numerics::KrylovOptions opts;
    opts.tol = 1e-13;
    numerics::KrylovPropagator<double> krylov(
        [this](const Eigen::VectorXd& x, Eigen::VectorXd& y) { y = l_h_real_ * x; }, norm_, opts);
    krylov.propagate(v, tau_);
  }
  out = e_real_ * v;
}

void FloquetOperator::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  Eigen::VectorXd re, im;
  apply(Eigen::VectorXd(in.real()), re);
  apply(Eigen::VectorXd(in.imag()), im);
  out = re.cast<cd>() + cd(0, 1) * im.cast<cd>();
}

PermSuperMatrix FloquetOperator::materialize(Eigen::Index max_dim, double budget_bytes) const {
  const Eigen::Index d = size();
  if (d > max_dim || static_cast<double>(d) * static_cast<double>(d) * sizeof(cd) > budget_bytes)
    throw CapacityError("Floquet propagator of dimension " + std::to_string(d) +
                        " exceeds the materialization budget; apply it as an operator instead");
  std::vector<Eigen::Triplet<cd>> t;
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(d), col;
  for (Eigen::Index k = 0; k < d; ++k) {
    unit(k) = 1.0;
    apply(unit, col);
    unit(k) = 0.0;
    for (Eigen::Index r = 0; r < d; ++r)
      if (col(r) != 0.0) t.emplace_back(r, k, col(r));
  }
  PermSuperMatrix m;
  m.kind = MatrixKind::FloquetPropagator;
  m.params = l_h_.params;
  m.params.tau = tau_;
  m.params.p = e_.params.p;
  m.matrix.resize(d, d);
  m.matrix.setFromTriplets(t.begin(), t.end());
  return m;
}

FloquetOperator floquet_propagator_perm(const PermSuperMatrix& l_h, const PermSuperMatrix& e, double tau) {
  return FloquetOperator(l_h, e, tau);
}

}  // namespace dissim::permsym
