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

// Dormand-Prince 5(4) integrator with FSAL and step clipping at requested
// output times. Works for any Eigen column vector type.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include <Eigen/Core>

#include "dissim/error.hpp"

namespace dissim::numerics {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-11;
  double initial_step = 0.0;  // 0 selects a step from the initial derivative
  double max_step = 0.0;      // 0 means unbounded
  double min_step = 1e-13;
  std::size_t max_steps = 50'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  double last_step = 0.0;
};

namespace detail {

template <typename Vec>
double scaled_rms(const Vec& e, const Vec& y0, const Vec& y1, double atol, double rtol) {
  const auto scale = atol + rtol * y0.array().abs().max(y1.array().abs());
  return std::sqrt((e.array().abs() / scale).square().mean());
}

}  // namespace detail

/// Integrates dy/dt = rhs(y) from t0 and calls observe(k, y) at every output
/// time output_times[k]. Output times must be non-decreasing and >= t0.
/// rhs has signature void(const Vec& y, Vec& dydt).
template <typename Vec, typename Rhs, typename Observer>
OdeStats integrate_dopri5(Vec& y, double t0, std::span<const double> output_times, Rhs&& rhs,
                          Observer&& observe, const OdeOptions& opts = {}) {
  // Butcher tableau.
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                   a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                   b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  OdeStats stats;
  double t = t0;
  std::size_t next = 0;
  while (next < output_times.size() && output_times[next] <= t) {
    if (output_times[next] < t) throw ArgumentError("output times must be >= t0 and sorted");
    observe(next, static_cast<const Vec&>(y));
    ++next;
  }
  if (next == output_times.size()) return stats;

  const Eigen::Index n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), err(n);
  rhs(y, k1);
  ++stats.rhs_evaluations;

  double h = opts.initial_step;
  if (h <= 0.0) {
    const double d0 = detail::scaled_rms(y, y, y, opts.atol, opts.rtol);
    const double d1 = detail::scaled_rms(k1, y, y, opts.atol, opts.rtol);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  }
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);

  std::size_t steps = 0;
  while (next < output_times.size()) {
    const double target = output_times[next];
    if (output_times[next] < t) throw ArgumentError("output times must be sorted ascending");
    bool hits_target = false;
    double step = h;
    if (t + step >= target) {
      step = target - t;
      hits_target = true;
    }

    tmp = y + step * (a21 * k1);
    rhs(tmp, k2);
    tmp = y + step * (a31 * k1 + a32 * k2);
    rhs(tmp, k3);
    tmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(tmp, k4);
    tmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(tmp, k5);
    tmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(tmp, k6);
    tmp = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(tmp, k7);
    stats.rhs_evaluations += 6;

    err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double error_norm = detail::scaled_rms(err, y, tmp, opts.atol, opts.rtol);

    if (!std::isfinite(error_norm)) throw StiffnessError("non-finite error estimate in Runge-Kutta step");
    if (error_norm <= 1.0) {
      t = hits_target ? target : t + step;
      y.swap(tmp);
      k1.swap(k7);
      ++stats.accepted;
      stats.last_step = step;
      while (next < output_times.size() && output_times[next] <= t) {
        observe(next, static_cast<const Vec&>(y));
        ++next;
      }
    } else {
      ++stats.rejected;
    }
    const double factor =
        error_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(error_norm, -0.2), 0.2, 5.0);
    // A clipped step says nothing about the natural step size unless it failed.
    if (!(hits_target && error_norm <= 1.0)) h = step * factor;
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    if (h < opts.min_step)
      throw StiffnessError("step size underflow at t = " + std::to_string(t) + " (h = " + std::to_string(h) + ")");
    if (++steps > opts.max_steps) throw ConvergenceError("ODE integration exceeded max_steps");
  }
  return stats;
}

}  // namespace dissim::numerics
