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
#include "dissim/model.hpp"

#include <cmath>
#include <string>

#include "dissim/error.hpp"

namespace dissim::model {

void ModelSpec::validate() const {
  if (n_spins < 1) throw ArgumentError("n_spins must be >= 1, got " + std::to_string(n_spins));
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw ArgumentError("alpha must be a finite non-negative number");
  if (!std::isfinite(delta)) throw ArgumentError("delta must be finite");
  if (j_sign != 1 && j_sign != -1) throw ArgumentError("j_sign must be +1 or -1");
}

ModelSpec ModelSpec::sign_flipped() const {
  ModelSpec flipped = *this;
  flipped.j_sign = -j_sign;
  flipped.delta = -delta;
  return flipped;
}

double CouplingMatrix::average_row_sum() const {
  const int n = size();
  if (n == 0) return 0.0;
  return entries.sum() / n;  // diagonal is zero
}

CouplingMatrix build_coupling_matrix(const ModelSpec& spec) {
  spec.validate();
  const int n = spec.n_spins;
  CouplingMatrix result;
  result.entries = Eigen::MatrixXd::Zero(n, n);
  if (n == 1) return result;  // no pairs to normalize

  // Unnormalized 1/|i-j|^alpha profile, then a single scale so the mean row sum is J_total.
  double pair_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double value = spec.alpha == 0.0 ? 1.0 : std::pow(static_cast<double>(j - i), -spec.alpha);
      result.entries(i, j) = value;
      result.entries(j, i) = value;
      pair_sum += 2.0 * value;
    }
  }
  const double j0 = spec.alpha == 0.0 ? kJTotal / (n - 1) : kJTotal * n / pair_sum;
  result.entries *= spec.j_sign * j0;
  return result;
}

void validate(const Continuous& rates) {
  if (!std::isfinite(rates.gamma_e) || rates.gamma_e < 0.0)
    throw ArgumentError("gamma_e must be finite and non-negative");
  if (!std::isfinite(rates.gamma_d) || rates.gamma_d < 0.0)
    throw ArgumentError("gamma_d must be finite and non-negative");
}

void validate(const Floquet& params) {
  if (!(params.tau > 0.0) || !std::isfinite(params.tau)) throw ArgumentError("Floquet tau must be > 0");
  if (!(params.p >= 0.0 && params.p <= 1.0)) throw ArgumentError("Floquet p must lie in [0, 1]");
}

void DissipationSpec::validate() const {
  std::visit([](const auto& m) { model::validate(m); }, mode);
}

const Continuous& DissipationSpec::continuous() const {
  if (const auto* c = std::get_if<Continuous>(&mode)) return *c;
  throw ArgumentError("dissipation is Floquet, continuous rates requested");
}

const Floquet& DissipationSpec::floquet() const {
  if (const auto* f = std::get_if<Floquet>(&mode)) return *f;
  throw ArgumentError("dissipation is continuous, Floquet parameters requested");
}

double floquet_rate_map(double gamma, double tau) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ArgumentError("gamma must be non-negative");
  if (!(tau > 0.0)) throw ArgumentError("tau must be positive");
  const double p = gamma * tau;
  if (p > 1.0)
    throw ArgumentError("gamma * tau = " + std::to_string(p) + " exceeds 1; tau too large for the requested rate");
  return p;
}

}  // namespace dissim::model
