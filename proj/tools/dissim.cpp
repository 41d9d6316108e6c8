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
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dissim/analysis.hpp"
#include "dissim/error.hpp"
#include "dissim/sweep.hpp"

namespace {

using namespace dissim;

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ArgumentError("bad entry '" + item + "' in --n");
    }
  }
  return out;
}

void print_cell(const sweep::CellRecord& c, std::size_t done, std::size_t total) {
  std::fprintf(stderr, "[%zu/%zu] delta=%s gamma=%s n=%d m_f=%s%s\n", done, total,
               sweep::format_double(c.delta).c_str(), sweep::format_double(c.gamma).c_str(), c.n,
               sweep::format_double(c.m_f).c_str(), c.error.empty() ? "" : (" error: " + c.error).c_str());
}

int finish(const sweep::SweepResult& result, const sweep::SweepConfig& config) {
  for (const auto& path : sweep::emit(result, config.directory, config.formats))
    std::fprintf(stderr, "wrote %s\n", path.c_str());
  std::size_t failed = 0;
  for (const auto& c : result.cells) failed += c.converged ? 0 : 1;
  std::fprintf(stderr, "%zu cells, %d solved now, %zu not converged\n", result.cells.size(), result.recomputed,
               failed);
  return result.all_converged() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dissim: steady states and two-time correlations of the driven-dissipative Ising chain"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DISSIM_VERSION);

  std::string config_path;
  bool no_resume = false, quiet = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve every (delta, gamma) cell of a config");
  sweep_cmd->add_option("--config", config_path, "JSON sweep config")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_flag("--no-resume", no_resume, "Ignore an existing checkpoint");
  sweep_cmd->add_flag("-q,--quiet", quiet, "No per-cell progress");

  std::string n_list;
  std::optional<double> scaling_delta, scaling_gamma;
  auto* scaling_cmd = app.add_subcommand("scaling", "||C|| and ||chi|| against N at one (delta, gamma)");
  scaling_cmd->add_option("--config", config_path, "JSON sweep config")->required()->check(CLI::ExistingFile);
  scaling_cmd->add_option("--n", n_list, "Comma-separated system sizes")->required();
  scaling_cmd->add_option("--delta", scaling_delta, "Override the config's delta");
  scaling_cmd->add_option("--gamma", scaling_gamma, "Override the config's gamma");
  scaling_cmd->add_flag("--no-resume", no_resume, "Ignore an existing checkpoint");

  analysis::CellSpec cell;
  std::string engine = "dense", out_path;
  bool fast = false;
  auto* corr_cmd = app.add_subcommand("correlations", "Write t,c_xy,c_yx,chi_xy,chi_yx for one point");
  corr_cmd->add_option("--delta", cell.model.delta)->required();
  corr_cmd->add_option("--gamma", cell.gamma)->required()->check(CLI::NonNegativeNumber);
  corr_cmd->add_option("--n", cell.model.n_spins)->required()->check(CLI::PositiveNumber);
  corr_cmd->add_option("--engine", engine)->required();
  corr_cmd->add_option("--alpha", cell.model.alpha, "Power-law exponent")->check(CLI::NonNegativeNumber);
  corr_cmd->add_option("--j-sign", cell.model.j_sign)->check(CLI::IsMember({-1, 1}));
  corr_cmd->add_option("--tau", cell.tau, "Floquet period (p = gamma tau)");
  corr_cmd->add_option("-o,--out", out_path, "Output CSV (stdout if omitted)");
  corr_cmd->add_flag("--fast", fast, "Dense evolution horizon 20 instead of 100");

  model::ModelSpec audit_model;
  audit_model.n_spins = 4;
  std::string audit_engine = "dense";
  double audit_gamma = 1.0, audit_tau = 0.0, tolerance = 1e-8;
  std::optional<double> audit_p;
  auto* audit_cmd = app.add_subcommand("audit-hsign", "Check the H -> -H relations for one model");
  audit_cmd->add_option("--n", audit_model.n_spins)->check(CLI::PositiveNumber);
  audit_cmd->add_option("--delta", audit_model.delta)->required();
  audit_cmd->add_option("--alpha", audit_model.alpha)->check(CLI::NonNegativeNumber);
  audit_cmd->add_option("--engine", audit_engine);
  audit_cmd->add_option("--gamma", audit_gamma, "gamma_e = gamma_d, or p = gamma tau")->check(CLI::NonNegativeNumber);
  audit_cmd->add_option("--tau", audit_tau, "Floquet period");
  audit_cmd->add_option("--p", audit_p, "Floquet reset probability (overrides gamma tau)");
  audit_cmd->add_option("--tolerance", tolerance);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep_cmd) {
      const auto config = sweep::SweepConfig::load(config_path);
      sweep::RunOptions opts;
      opts.resume = !no_resume;
      if (!quiet) opts.progress = print_cell;
      return finish(sweep::run_sweep(config, opts), config);
    }
    if (*scaling_cmd) {
      auto config = sweep::SweepConfig::load(config_path);
      if (scaling_delta) config.delta_grid = {*scaling_delta, *scaling_delta, 1, "linear"};
      if (scaling_gamma) config.gamma_grid = {*scaling_gamma, *scaling_gamma, 1, "linear"};
      config.name += "-scaling";
      sweep::RunOptions opts;
      opts.resume = !no_resume;
      opts.progress = print_cell;
      const auto result = sweep::run_scaling(config, parse_n_list(n_list), opts);
      std::printf("n,norm_c,norm_chi\n");
      for (const auto& c : result.cells)
        std::printf("%d,%s,%s\n", c.n, c.norm_c ? sweep::format_double(*c.norm_c).c_str() : "nan",
                    c.norm_chi ? sweep::format_double(*c.norm_chi).c_str() : "nan");
      return finish(result, config);
    }
    if (*corr_cmd) {
      cell.engine = analysis::parse_engine(engine);
      if (cell.engine == analysis::Engine::MeanField) throw ArgumentError("the mean-field engine has no correlations");
      analysis::CellOptions opts;
      opts.horizon = fast ? 20.0 : 100.0;
      const auto outcome = analysis::evaluate_cell(cell, opts);
      if (!outcome.error.empty()) throw Error(outcome.error);
      const std::string csv = sweep::correlations_csv(*outcome.correlations);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream os(out_path);
        if (!(os << csv)) throw IoError("cannot write " + out_path);
      }
      const auto& d = outcome.trs;
      std::fprintf(stderr, "m_f=%s norm_c=%s norm_chi=%s converged=%s %s\n", sweep::format_double(outcome.m_f).c_str(),
                   d.norm_c ? sweep::format_double(*d.norm_c).c_str() : "undefined",
                   d.norm_chi ? sweep::format_double(*d.norm_chi).c_str() : "undefined",
                   outcome.converged ? "true" : "false", analysis::trs_label(d).c_str());
      return outcome.converged ? 0 : 1;
    }
    if (*audit_cmd) {
      const auto e = analysis::parse_engine(audit_engine);
      model::DissipationSpec diss;
      if (analysis::is_floquet(e)) diss.mode = model::Floquet{audit_tau, audit_p.value_or(model::floquet_rate_map(audit_gamma, audit_tau))};
      else diss.mode = model::Continuous{audit_gamma, audit_gamma};
      const auto report = analysis::h_sign_audit(audit_model, diss, e, tolerance);
      std::cout << report.describe();
      return report.passed() ? 0 : 1;
    }
  } catch (const dissim::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
