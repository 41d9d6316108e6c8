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

#include <variant>

#include <Eigen/Dense>

namespace dissim::model {

// Energies are measured in units of the normalized total interaction J_total = 1,
// times in units of 1/J_total.
inline constexpr double kJTotal = 1.0;

enum class Geometry { OpenChain };

/// Transverse-field Ising chain H = sum_{i<j} J_ij X_i X_j - delta sum_i Z_i.
struct ModelSpec {
  int n_spins = 1;
  double alpha = 0.0;  // J_ij ~ 1/|i-j|^alpha
  double delta = 0.0;  // transverse field
  int j_sign = +1;     // +1: J_ij > 0 (antiferromagnetic sign convention)
  Geometry geometry = Geometry::OpenChain;

  void validate() const;

  // The same model with H -> -H (both the Ising sign and the field flipped).
  ModelSpec sign_flipped() const;
};

/// Symmetric, zero-diagonal couplings whose spatially averaged row sum equals
/// j_sign * j_total.
struct CouplingMatrix {
  Eigen::MatrixXd entries;
  double j_total = kJTotal;

  int size() const { return static_cast<int>(entries.rows()); }
  // (1/N) sum_{i != j} J_ij
  double average_row_sum() const;
};

CouplingMatrix build_coupling_matrix(const ModelSpec& spec);

struct Continuous {
  double gamma_e = 0.0;  // pumping |0> -> |1>
  double gamma_d = 0.0;  // dephasing
};

struct Floquet {
  double tau = 0.0;  // period of the coherent step
  double p = 0.0;    // per-spin reset probability at the end of every period
};

struct DissipationSpec {
  std::variant<Continuous, Floquet> mode;

  void validate() const;
  bool is_floquet() const { return std::holds_alternative<Floquet>(mode); }
  const Continuous& continuous() const;
  const Floquet& floquet() const;
};

void validate(const Continuous& rates);
void validate(const Floquet& params);

// Reset probability that matches a continuous rate gamma to first order in tau.
double floquet_rate_map(double gamma, double tau);

}  // namespace dissim::model
