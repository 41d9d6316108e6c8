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
#include "dissim/meanfield.hpp"

#include <algorithm>
#include <cmath>

#include "dissim/error.hpp"

namespace dissim::meanfield {

MeanFieldResult cumulant_correlator(double delta, double gamma_e, double gamma_d, double j_total) {
  if (delta == 0.0 || !std::isfinite(delta)) throw ArgumentError("mean-field reduction is singular at delta = 0");
  if (!(j_total > 0.0)) throw ArgumentError("j_total must be positive");
  if (!(gamma_e >= 0.0) || !(gamma_d >= 0.0) || !std::isfinite(gamma_e) || !std::isfinite(gamma_d))
    throw ArgumentError("rates must be finite and non-negative");

  const double g = gamma_e + gamma_d;
  const double ratio = g == 0.0 ? 0.5 : gamma_e / g;
  MeanFieldResult r;
  r.xx_correlator = ratio * (16.0 * delta * (j_total - delta) - g * g) / (4.0 * j_total * j_total);
  r.z = -(8.0 * delta + g * g / (2.0 * delta)) / (8.0 * j_total);
  r.mf_order = std::max(r.xx_correlator, 0.0);
  r.ferromagnetic = r.xx_correlator > 0.0;
  r.boundary_gamma_sum = phase_boundary(delta, j_total);
  return r;
}

std::optional<double> phase_boundary(double delta, double j_total) {
  if (!(delta >= 0.0 && delta <= j_total)) return std::nullopt;
  return 4.0 * std::sqrt(delta * (j_total - delta));
}

}  // namespace dissim::meanfield
