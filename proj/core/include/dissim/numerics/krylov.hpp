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

// Action of the matrix exponential exp(t A) v by restarted Arnoldi with the
// local error estimate and step-size control of Sidje's Expokit. The small
// Hessenberg exponential is delegated to Eigen's Pade-based MatrixFunctions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "dissim/error.hpp"

namespace dissim::numerics {

struct KrylovOptions {
  int dimension = 30;
  double tol = 1e-12;  // local error tolerance per unit time, relative to |v|
  int max_rejects = 40;
};

struct KrylovStats {
  long matvecs = 0;
  long steps = 0;
  long rejects = 0;
};

/// Propagates vectors under exp(t A) for a fixed operator A applied as
/// op(const Vec& in, Vec& out). norm_estimate is any upper-bound-like
/// estimate of |A| used to pick the first substep.
template <typename Scalar>
class KrylovPropagator {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Operator = std::function<void(const Vec&, Vec&)>;

  KrylovPropagator(Operator op, double norm_estimate, KrylovOptions opts = {})
      : op_(std::move(op)), anorm_(std::max(norm_estimate, 1e-300)), opts_(opts) {}

  /// v <- exp(t A) v.
  void propagate(Vec& v, double t) {
    const double times[] = {t};
    propagate_grid(v, times, [](std::size_t, const Vec&) {});
  }

  /// Advances v through the ascending offsets in times (relative to the
  /// current v), calling observe(k, exp(times[k] A) v). Outputs that fall
  /// inside one Krylov step reuse its basis. On return v holds the state at
  /// times.back().
  template <typename Observer>
  void propagate_grid(Vec& v, std::span<const double> times, Observer&& observe) {
    Vec w(v.size());
    advance(v, times, [&](std::size_t k, const Vec* state, const Vec& coeffs, int used, long) {
      if (state) return observe(k, *state);
      w.setZero();
      for (int i = 0; i < used; ++i) w += coeffs(i) * basis_[i];
      observe(k, static_cast<const Vec&>(w));
    });
  }

  /// Like propagate_grid, but reports only the scalars f_j . v(t) for the given
  /// functionals, which avoids forming intermediate vectors.
  template <typename Observer>
  void propagate_functionals(Vec& v, std::span<const double> times, const std::vector<Vec>& functionals,
                             Observer&& observe) {
    const auto nf = static_cast<Eigen::Index>(functionals.size());
    Mat projections;
    long cached_step = -1;
    Vec values(nf);
    advance(v, times, [&](std::size_t k, const Vec* state, const Vec& coeffs, int used, long step) {
      if (state) {
        for (Eigen::Index j = 0; j < nf; ++j) values(j) = functionals[j].dot(*state);
        return observe(k, static_cast<const Vec&>(values));
      }
      if (step != cached_step) {
        projections.resize(nf, used);
        for (Eigen::Index j = 0; j < nf; ++j)
          for (int i = 0; i < used; ++i) projections(j, i) = functionals[j].dot(basis_[i]);
        cached_step = step;
      }
      values = projections * coeffs.head(used);
      observe(k, static_cast<const Vec&>(values));
    });
  }

  const KrylovStats& stats() const { return stats_; }

 private:
  // emit(k, state, coeffs, used, step): either state != nullptr, or the output is
  // sum_i coeffs(i) basis_[i] for i < used within Krylov step number step.
  template <typename Emit>
  void advance(Vec& v, std::span<const double> times, Emit&& emit) {
    for (std::size_t k = 0; k < times.size(); ++k)
      if (times[k] < 0.0 || (k > 0 && times[k] < times[k - 1]))
        throw ArgumentError("Krylov output times must be non-negative and ascending");
    const Vec no_coeffs;
    std::size_t next = 0;
    while (next < times.size() && times[next] == 0.0) emit(next++, &v, no_coeffs, 0, -1);
    if (next == times.size()) return;

    const double t = times.back();
    const Eigen::Index n = v.size();
    const int m = static_cast<int>(std::min<Eigen::Index>(opts_.dimension, n));
    const double gamma = 0.9, delta = 1.2;
    const double xm0 = 1.0 / m;

    double beta = v.norm();
    if (beta == 0.0) {
      while (next < times.size()) emit(next++, &v, no_coeffs, 0, -1);
      return;
    }
    const double tol = opts_.tol;

    double t_now = 0.0;
    double t_step = step_hint_;
    if (t_step <= 0.0) {
      const double fact = std::pow((m + 1) / std::numbers::e, m + 1) * std::sqrt(2.0 * std::numbers::pi * (m + 1));
      t_step = (1.0 / anorm_) * std::pow((fact * tol) / (4.0 * beta * anorm_), xm0);
      t_step = round_two_digits(t_step);
    }

    basis_.resize(m + 1);
    for (auto& b : basis_) b.resize(n);
    Vec w(n);
    while (t_now < t) {
      const long step_id = stats_.steps++;
      const double t_remaining = t - t_now;
      t_step = std::min(t_remaining, t_step);

      Mat hess = Mat::Zero(m + 2, m + 2);
      basis_[0] = v / beta;
      int mx = m;
      double avnorm = 0.0;
      bool happy = false;
      for (int j = 0; j < m; ++j) {
        op_(basis_[j], w);
        ++stats_.matvecs;
        for (int i = 0; i <= j; ++i) {
          const Scalar h = basis_[i].dot(w);
          hess(i, j) = h;
          w -= h * basis_[i];
        }
        const double s = w.norm();
        if (s <= 1e-13 * anorm_) {  // invariant subspace found
          happy = true;
          mx = j + 1;
          t_step = t_remaining;
          break;
        }
        hess(j + 1, j) = s;
        basis_[j + 1] = w / s;
      }
      if (!happy) {
        hess(m + 1, m) = Scalar(1.0);
        op_(basis_[m], w);
        ++stats_.matvecs;
        avnorm = w.norm();
      }

      const int mh = happy ? mx : m + 2;
      int rejects = 0;
      Mat expo;
      double err_loc = 0.0;
      double xm = xm0;
      while (true) {
        Mat scaled = t_step * hess.topLeftCorner(mh, mh);
        expo = scaled.exp();
        if (happy) {
          err_loc = 0.0;
          break;
        }
        const double phi1 = std::abs(beta * expo(m, 0));
        const double phi2 = std::abs(beta * expo(m + 1, 0) * avnorm);
        if (phi1 > 10.0 * phi2) {
          err_loc = phi2;
          xm = xm0;
        } else if (phi1 > phi2) {
          err_loc = (phi1 * phi2) / (phi1 - phi2);
          xm = xm0;
        } else {
          err_loc = phi1;
          xm = 1.0 / (m - 1 > 0 ? m - 1 : 1);
        }
        if (err_loc <= delta * t_step * tol * beta) break;
        if (++rejects > opts_.max_rejects)
          throw ConvergenceError("Krylov exponential: requested tolerance unreachable");
        ++stats_.rejects;
        t_step = gamma * t_step * std::pow(t_step * tol * beta / err_loc, xm);
        t_step = round_two_digits(t_step);
      }

      const int used = happy ? mx : m + 1;
      const double t_end = t_step >= t_remaining ? t : t_now + t_step;
      while (next < times.size() && times[next] <= t_end) {
        const Mat part = times[next] == t_end ? expo : Mat(((times[next] - t_now) * hess.topLeftCorner(mh, mh)).exp());
        const Vec coeffs = beta * part.col(0).head(used);
        emit(next++, nullptr, coeffs, used, step_id);
      }
      v.setZero();
      for (int i = 0; i < used; ++i) v += (beta * expo(i, 0)) * basis_[i];
      beta = v.norm();
      t_now = t_end;

      if (!happy) {
        double t_new = gamma * t_step * std::pow(t_step * tol * beta / std::max(err_loc, 1e-300), xm);
        t_step = round_two_digits(std::min(t_new, 10.0 * t_step));
        step_hint_ = t_step;
      }
      if (beta == 0.0) {
        while (next < times.size()) emit(next++, &v, no_coeffs, 0, -1);
        return;
      }
    }
  }

  static double round_two_digits(double x) {
    if (x <= 0.0) return x;
    const double s = std::pow(10.0, std::floor(std::log10(x)) - 1.0);
    return std::ceil(x / s) * s;
  }

  Operator op_;
  double anorm_;
  KrylovOptions opts_;
  double step_hint_ = 0.0;
  KrylovStats stats_;
  std::vector<Vec> basis_;
};

}  // namespace dissim::numerics
