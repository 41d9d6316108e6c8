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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dissim/analysis.hpp"
#include "dissim/model.hpp"

namespace dissim::sweep {

struct GridAxis {
  double min = 0.0;
  double max = 0.0;
  int count = 1;
  std::string spacing = "linear";

  std::vector<double> values() const;
};

struct SweepConfig {
  std::string name = "sweep";
  analysis::Engine engine = analysis::Engine::MeanField;
  model::ModelSpec model;
  GridAxis delta_grid;
  GridAxis gamma_grid;
  std::optional<double> tau;  // Floquet engines only
  bool correlations = true;   // compute norm_c / norm_chi
  bool fast = false;          // dense evolution horizon 20 instead of 100
  std::filesystem::path directory = ".";
  std::vector<std::string> formats{"csv", "json"};
  int workers = 1;
  std::uint64_t seed = 1;
  int checkpoint_interval = 10;

  /// Throws ArgumentError naming the offending field.
  static SweepConfig from_json(const nlohmann::json& doc);
  static SweepConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  void validate() const;
  /// SHA-256 of the canonical JSON form; independent of key order in the source file.
  std::string hash() const;
};

struct CellRecord {
  double delta = 0.0;
  double gamma = 0.0;
  int n = 0;
  double alpha = 0.0;
  analysis::Engine engine = analysis::Engine::MeanField;
  double tau = 0.0;
  double p = 0.0;
  double m_f = 0.0;
  std::optional<double> norm_c;
  std::optional<double> norm_chi;
  bool converged = false;
  double wall_seconds = 0.0;
  std::string error;

  nlohmann::json to_json() const;
  static CellRecord from_json(const nlohmann::json& j);
};

struct Provenance {
  std::string config_hash;
  std::string version;
  std::string timestamp;  // UTC, ISO 8601
};

struct SweepResult {
  std::string name;
  std::vector<double> delta_axis;
  std::vector<double> gamma_axis;
  std::vector<CellRecord> cells;  // delta-major
  Provenance provenance;
  int recomputed = 0;             // cells solved by this run (the rest came from the checkpoint)

  bool all_converged() const;
};

struct RunOptions {
  bool resume = true;
  // Stop after this many newly solved cells; used to simulate an interrupted run.
  std::optional<int> stop_after;
  std::function<void(const CellRecord&, std::size_t done, std::size_t total)> progress;
};

/// Worker count after the DISSIM_THREADS override.
int effective_workers(int configured);

SweepResult run_sweep(const SweepConfig& config, const RunOptions& opts = {});

/// One row per N at (delta_grid.min, gamma_grid.min); requires single-point grids.
SweepResult run_scaling(const SweepConfig& config, const std::vector<int>& n_list, const RunOptions& opts = {});

std::filesystem::path checkpoint_path(const SweepConfig& config);

// Emission.

inline constexpr std::string_view kCsvHeader =
    "delta,gamma,n,alpha,engine,tau,p,m_f,norm_c,norm_chi,converged,wall_seconds";
inline constexpr std::string_view kCorrelationHeader = "t,c_xy,c_yx,chi_xy,chi_yx";

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

std::string to_csv(const SweepResult& result);
nlohmann::json to_json(const SweepResult& result);
std::vector<CellRecord> parse_csv(std::string_view text);

std::string correlations_csv(const analysis::CorrelationSet& set);

/// Writes <directory>/<name>.csv and/or .json atomically; returns the paths written.
std::vector<std::filesystem::path> emit(const SweepResult& result, const std::filesystem::path& directory,
                                        const std::vector<std::string>& formats);

}  // namespace dissim::sweep
