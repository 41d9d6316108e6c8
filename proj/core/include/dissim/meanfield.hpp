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

// Closed-form second-order cumulant predictions for the uniform (all-to-all
// equivalent) model with spatially averaged coupling j_total.

#include <optional>

namespace dissim::meanfield {

struct MeanFieldResult {
  double z = 0.0;                // <sigma^z> on the ferromagnetic branch
  double xx_correlator = 0.0;    // <sigma_i^x sigma_j^x>, negative inside the paramagnet
  double mf_order = 0.0;         // max(xx_correlator, 0)
  std::optional<double> boundary_gamma_sum;  // gamma_e + gamma_d on the phase boundary
  bool ferromagnetic = false;    // xx_correlator > 0; z is only meaningful here
};

/// Throws ArgumentError for delta == 0 (singular field) or j_total <= 0.
MeanFieldResult cumulant_correlator(double delta, double gamma_e, double gamma_d, double j_total = 1.0);

/// gamma_e + gamma_d at which the ordered phase disappears, absent when
/// delta lies outside [0, j_total].
std::optional<double> phase_boundary(double delta, double j_total = 1.0);

}  // namespace dissim::meanfield
