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

// Restarted, right-preconditioned GMRES with Givens rotations.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace dissim::numerics {

struct GmresOptions {
  int restart = 60;
  int max_iterations = 2000;
  double tol = 1e-12;  // on |b - A x| / |b|
};

struct GmresResult {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

namespace detail {

inline double conj_if_complex(double x) { return x; }
inline std::complex<double> conj_if_complex(std::complex<double> x) { return std::conj(x); }

}  // namespace detail

/// Solves A x = b. precond applies M^{-1} with M ~ A (identity when empty).
/// x holds the initial guess on entry.
template <typename Scalar>
GmresResult gmres(const std::function<void(const Eigen::Matrix<Scalar, -1, 1>&, Eigen::Matrix<Scalar, -1, 1>&)>& apply,
                  const std::function<void(const Eigen::Matrix<Scalar, -1, 1>&, Eigen::Matrix<Scalar, -1, 1>&)>& precond,
                  const Eigen::Matrix<Scalar, -1, 1>& b, Eigen::Matrix<Scalar, -1, 1>& x,
                  const GmresOptions& opts = {}) {
  using Vec = Eigen::Matrix<Scalar, -1, 1>;
  const Eigen::Index n = b.size();
  const double bnorm = b.norm() > 0.0 ? b.norm() : 1.0;
  const int m = opts.restart;

  GmresResult result;
  Vec r(n), w(n), z(n);
  std::vector<Vec> basis(m + 1, Vec(n));
  Eigen::Matrix<Scalar, -1, -1> hess(m + 1, m);
  std::vector<Scalar> cs(m), sn(m);
  Vec g(m + 1);

  auto precondition = [&](const Vec& in, Vec& out) {
    if (precond) precond(in, out);
    else out = in;
  };

  while (result.iterations < opts.max_iterations) {
    apply(x, w);
    r = b - w;
    double beta = r.norm();
    result.relative_residual = beta / bnorm;
    if (result.relative_residual <= opts.tol) {
      result.converged = true;
      return result;
    }
    basis[0] = r / beta;
    g.setZero();
    g(0) = beta;
    hess.setZero();
    int j = 0;
    for (; j < m && result.iterations < opts.max_iterations; ++j) {
      ++result.iterations;
      precondition(basis[j], z);
      apply(z, w);
      for (int i = 0; i <= j; ++i) {
        hess(i, j) = basis[i].dot(w);
        w -= hess(i, j) * basis[i];
      }
      const double h_next = w.norm();
      hess(j + 1, j) = h_next;
      if (h_next > 0.0) basis[j + 1] = w / h_next;
      for (int i = 0; i < j; ++i) {
        const Scalar tmp = detail::conj_if_complex(cs[i]) * hess(i, j) + detail::conj_if_complex(sn[i]) * hess(i + 1, j);
        hess(i + 1, j) = -sn[i] * hess(i, j) + cs[i] * hess(i + 1, j);
        hess(i, j) = tmp;
      }
      const Scalar a = hess(j, j);
      const double bb = std::abs(hess(j + 1, j));
      const double denom = std::sqrt(std::norm(a) + bb * bb);
      if (denom == 0.0) {
        cs[j] = Scalar(1.0);
        sn[j] = Scalar(0.0);
      } else {
        cs[j] = a / denom;
        sn[j] = hess(j + 1, j) / denom;
      }
      hess(j, j) = detail::conj_if_complex(cs[j]) * a + detail::conj_if_complex(sn[j]) * hess(j + 1, j);
      hess(j + 1, j) = Scalar(0.0);
      g(j + 1) = -sn[j] * g(j);
      g(j) = detail::conj_if_complex(cs[j]) * g(j);
      result.relative_residual = std::abs(g(j + 1)) / bnorm;
      if (result.relative_residual <= opts.tol || h_next == 0.0) {
        ++j;
        break;
      }
    }
    // Back substitution on the rotated upper-triangular system.
    Vec y(j);
    for (int i = j - 1; i >= 0; --i) {
      Scalar s = g(i);
      for (int k = i + 1; k < j; ++k) s -= hess(i, k) * y(k);
      y(i) = s / hess(i, i);
    }
    Vec update = Vec::Zero(n);
    for (int i = 0; i < j; ++i) update += y(i) * basis[i];
    precondition(update, z);
    x += z;
  }
  apply(x, w);
  result.relative_residual = (b - w).norm() / bnorm;
  result.converged = result.relative_residual <= opts.tol;
  return result;
}

}  // namespace dissim::numerics
