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
#include <numbers>
#include <random>

#include "dissim/dense.hpp"
#include "dissim/error.hpp"

namespace dissim::dense {

namespace {

// Columns are the +1 and -1 eigenvectors of the Pauli matrix for the axis.
Eigen::Matrix2cd eigenbasis(Axis axis) {
  const double s = 1.0 / std::numbers::sqrt2;
  Eigen::Matrix2cd v;
  switch (axis) {
    case Axis::X:
      v << s, s, s, -s;
      break;
    case Axis::Y:
      v << s, s, cd(0, s), cd(0, -s);
      break;
    case Axis::Z:
      v.setIdentity();
      break;
  }
  return v;
}

void left_qubit(Eigen::MatrixXcd& x, int site, const Eigen::Matrix2cd& g) {
  const Eigen::Index m = Eigen::Index{1} << site;
  for (Eigen::Index b = 0; b < x.cols(); ++b) {
    cd* col = x.col(b).data();
    for (Eigen::Index a = 0; a < x.rows(); ++a) {
      if (a & m) continue;
      const cd u = col[a], w = col[a | m];
      col[a] = g(0, 0) * u + g(0, 1) * w;
      col[a | m] = g(1, 0) * u + g(1, 1) * w;
    }
  }
}

void right_qubit(Eigen::MatrixXcd& x, int site, const Eigen::Matrix2cd& g) {
  const Eigen::Index m = Eigen::Index{1} << site;
  for (Eigen::Index b = 0; b < x.cols(); ++b) {
    if (b & m) continue;
    Eigen::VectorXcd c0 = x.col(b);
    Eigen::VectorXcd c1 = x.col(b | m);
    x.col(b) = g(0, 0) * c0 + g(1, 0) * c1;
    x.col(b | m) = g(0, 1) * c0 + g(1, 1) * c1;
  }
}

// Probability of measuring S^axis = N - 2k, indexed by k.
std::vector<double> collective_distribution(const Eigen::MatrixXcd& rho, int n_spins, Axis axis) {
  Eigen::MatrixXcd r = rho;
  const Eigen::Matrix2cd v = eigenbasis(axis);
  const Eigen::Matrix2cd vh = v.adjoint();
  for (int i = 0; i < n_spins; ++i) {
    left_qubit(r, i, vh);
    right_qubit(r, i, v);
  }
  std::vector<double> q(static_cast<std::size_t>(n_spins) + 1, 0.0);
  for (Eigen::Index s = 0; s < r.rows(); ++s)
    q[static_cast<std::size_t>(std::popcount(static_cast<std::uint64_t>(s)))] += r(s, s).real();
  double total = 0.0;
  for (double& w : q) {
    w = std::max(w, 0.0);
    total += w;
  }
  if (total > 0.0)
    for (double& w : q) w /= total;
  return q;
}

struct Branch {
  double weight = 0.0;                      // trace of the unnormalized branch state
  std::vector<double> expectation;          // Tr[S^a E_t(branch)] per grid point (unnormalized)
  std::vector<std::vector<double>> distribution;  // normalized S^a distribution per grid point
};

Branch run_branch(const Eigen::MatrixXcd& rho0, const SuperOperator& L, std::span<const double> t_grid,
                  const ProtocolOptions& opts) {
  Branch br;
  br.weight = rho0.trace().real();
  br.expectation.resize(t_grid.size());
  br.distribution.resize(t_grid.size());
  const DenseOperator s_a = collective(L.n_spins(), opts.collective_axis);
  propagate(
      rho0, L, t_grid,
      [&](std::size_t k, const Eigen::MatrixXcd& x) {
        br.expectation[k] = expectation(s_a, x).real();
        br.distribution[k] = collective_distribution(x, L.n_spins(), opts.collective_axis);
      },
      opts.evolve);
  return br;
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
};

Moments sample_collective(const std::vector<double>& q, int n_spins, long samples, std::mt19937_64& rng) {
  std::discrete_distribution<int> dist(q.begin(), q.end());
  double sum = 0.0, sum2 = 0.0;
  for (long s = 0; s < samples; ++s) {
    const double value = n_spins - 2.0 * dist(rng);
    sum += value;
    sum2 += value * value;
  }
  Moments m;
  m.mean = sum / samples;
  m.variance = samples > 1 ? std::max(0.0, (sum2 - samples * m.mean * m.mean) / (samples - 1)) : 0.0;
  return m;
}

void check_inputs(const DenseState& rho_s, const SuperOperator& L, int site, const ProtocolOptions& opts) {
  if (opts.samples < 1) throw ArgumentError("protocol needs at least one sample");
  if (site < 0 || site >= L.n_spins()) throw ArgumentError("site index out of range");
  if (rho_s.rho.rows() != L.hilbert_dim()) throw ArgumentError("state dimension does not match the Liouvillian");
}

}  // namespace

std::vector<ProtocolPoint> protocol_re(const DenseState& rho_s, const SuperOperator& L, int site,
                                       std::span<const double> t_grid, const ProtocolOptions& opts) {
  check_inputs(rho_s, L, site, opts);
  const int n = L.n_spins();
  const Eigen::MatrixXcd sigma = pauli(n, site, opts.local_axis).to_dense();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(sigma.rows(), sigma.cols());
  const Eigen::MatrixXcd p_plus = 0.5 * (id + sigma);
  const Eigen::MatrixXcd p_minus = 0.5 * (id - sigma);

  const Branch plus = run_branch(p_plus * rho_s.rho * p_plus, L, t_grid, opts);
  const Branch minus = run_branch(p_minus * rho_s.rho * p_minus, L, t_grid, opts);
  const double w_plus = std::clamp(plus.weight / (plus.weight + minus.weight), 0.0, 1.0);

  std::mt19937_64 rng(opts.seed);
  std::vector<ProtocolPoint> out(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    std::bernoulli_distribution outcome(w_plus);
    std::discrete_distribution<int> d_plus(plus.distribution[k].begin(), plus.distribution[k].end());
    std::discrete_distribution<int> d_minus(minus.distribution[k].begin(), minus.distribution[k].end());
    double sum = 0.0, sum2 = 0.0;
    for (long s = 0; s < opts.samples; ++s) {
      const bool up = outcome(rng);
      const double value = n - 2.0 * (up ? d_plus(rng) : d_minus(rng));
      const double product = up ? value : -value;
      sum += product;
      sum2 += product * product;
    }
    const double m = static_cast<double>(opts.samples);
    const double mean = sum / m;
    const double var = opts.samples > 1 ? std::max(0.0, (sum2 - m * mean * mean) / (m - 1.0)) : 0.0;
    ProtocolPoint& pt = out[k];
    pt.t = t_grid[k];
    pt.estimate = mean;
    pt.standard_error = std::sqrt(var / m);
    pt.raw_difference = plus.expectation[k] - minus.expectation[k];
    pt.exact = pt.raw_difference;
  }
  return out;
}

std::vector<ProtocolPoint> protocol_im(const DenseState& rho_s, const SuperOperator& L, int site,
                                       std::span<const double> t_grid, const ProtocolOptions& opts) {
  check_inputs(rho_s, L, site, opts);
  const int n = L.n_spins();
  const Eigen::MatrixXcd sigma = pauli(n, site, opts.local_axis).to_dense();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(sigma.rows(), sigma.cols());
  const double c = std::cos(std::numbers::pi / 4.0), s = std::sin(std::numbers::pi / 4.0);
  const Eigen::MatrixXcd r_plus = c * id - cd(0, s) * sigma;   // exp(-i pi sigma / 4)
  const Eigen::MatrixXcd r_minus = c * id + cd(0, s) * sigma;  // exp(+i pi sigma / 4)

  const Branch plus = run_branch(r_plus * rho_s.rho * r_plus.adjoint(), L, t_grid, opts);
  const Branch minus = run_branch(r_minus * rho_s.rho * r_minus.adjoint(), L, t_grid, opts);

  std::mt19937_64 rng(opts.seed);
  std::vector<ProtocolPoint> out(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const Moments mp = sample_collective(plus.distribution[k], n, opts.samples, rng);
    const Moments mm = sample_collective(minus.distribution[k], n, opts.samples, rng);
    const double m = static_cast<double>(opts.samples);
    ProtocolPoint& pt = out[k];
    pt.t = t_grid[k];
    pt.estimate = kImaginaryProtocolFactor * (mp.mean - mm.mean);
    pt.standard_error = kImaginaryProtocolFactor * std::sqrt((mp.variance + mm.variance) / m);
    pt.raw_difference = plus.expectation[k] - minus.expectation[k];
    pt.exact = kImaginaryProtocolFactor * pt.raw_difference;
  }
  return out;
}

}  // namespace dissim::dense
