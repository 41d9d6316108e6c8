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
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "dissim/error.hpp"
#include "dissim/sweep.hpp"
#include "hash.hpp"

namespace dissim::sweep {

namespace {

using Checkpoint = std::map<std::size_t, CellRecord>;

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::string& key, std::size_t total) {
  Checkpoint done;
  std::ifstream is(path);
  if (!is) return done;
  try {
    const auto doc = nlohmann::json::parse(is);
    if (doc.at("key").get<std::string>() != key) return done;
    for (const auto& entry : doc.at("cells")) {
      const std::size_t index = entry.at("index");
      if (index < total) done.emplace(index, CellRecord::from_json(entry.at("record")));
    }
  } catch (const std::exception&) {
    // A damaged checkpoint only costs recomputation.
    done.clear();
  }
  return done;
}

void save_checkpoint(const std::filesystem::path& path, const std::string& key, const Checkpoint& done) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& [index, record] : done) cells.push_back({{"index", index}, {"record", record.to_json()}});
  detail::write_atomically(path, nlohmann::json{{"key", key}, {"cells", std::move(cells)}}.dump() + "\n");
}

CellRecord describe(const analysis::CellSpec& spec) {
  CellRecord r;
  r.delta = spec.model.delta;
  r.gamma = spec.gamma;
  r.n = spec.model.n_spins;
  r.alpha = spec.model.alpha;
  r.engine = spec.engine;
  r.tau = spec.tau;
  return r;
}

CellRecord solve(const analysis::CellSpec& spec, const analysis::CellOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const auto outcome = analysis::evaluate_cell(spec, opts);
  CellRecord r = describe(spec);
  r.p = outcome.p;
  r.m_f = outcome.m_f;
  r.norm_c = outcome.trs.norm_c;
  r.norm_chi = outcome.trs.norm_chi;
  r.converged = outcome.converged;
  r.error = outcome.error;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// Solves every job not already in the checkpoint, with one work queue shared
// by all workers. Records land at their job index, so the output order never
// depends on scheduling.
std::vector<CellRecord> run_jobs(const std::vector<analysis::CellSpec>& jobs, const SweepConfig& config,
                                 const std::filesystem::path& checkpoint, const std::string& key,
                                 const RunOptions& opts, int& recomputed) {
  std::error_code ec;
  std::filesystem::create_directories(config.directory, ec);
  if (ec) throw IoError("cannot create output directory " + config.directory.string());

  Checkpoint done = opts.resume ? load_checkpoint(checkpoint, key, jobs.size()) : Checkpoint{};
  std::vector<std::size_t> pending;
  for (std::size_t k = 0; k < jobs.size(); ++k)
    if (!done.contains(k)) pending.push_back(k);

  analysis::CellOptions cell_opts;
  cell_opts.correlations = config.correlations;
  cell_opts.horizon = config.fast ? 20.0 : 100.0;

  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> stop{false};
  std::mutex mutex;
  int fresh = 0, since_checkpoint = 0;
  std::exception_ptr failure;

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t slot = cursor.fetch_add(1);
      if (slot >= pending.size()) return;
      const std::size_t index = pending[slot];
      CellRecord record = solve(jobs[index], cell_opts);
      std::lock_guard lock(mutex);
      if (stop.load()) return;
      done.emplace(index, record);
      ++fresh;
      try {
        if (++since_checkpoint >= config.checkpoint_interval) {
          save_checkpoint(checkpoint, key, done);
          since_checkpoint = 0;
        }
        if (opts.progress) opts.progress(record, done.size(), jobs.size());
      } catch (...) {
        failure = std::current_exception();
        stop = true;
      }
      if (opts.stop_after && fresh >= *opts.stop_after) stop = true;
    }
  };

  const int workers = std::min<int>(effective_workers(config.workers), std::max<std::size_t>(pending.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  save_checkpoint(checkpoint, key, done);
  recomputed = fresh;

  std::vector<CellRecord> records(jobs.size());
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (auto it = done.find(k); it != done.end()) {
      records[k] = it->second;
    } else {
      records[k] = describe(jobs[k]);
      records[k].error = "interrupted";
    }
  }
  return records;
}

analysis::CellSpec make_job(const SweepConfig& config, int n, double delta, double gamma) {
  analysis::CellSpec spec;
  spec.engine = config.engine;
  spec.model = config.model;
  spec.model.n_spins = n;
  spec.model.delta = delta;
  spec.gamma = gamma;
  spec.tau = config.tau.value_or(0.0);
  return spec;
}

}  // namespace

int effective_workers(int configured) {
  if (const char* env = std::getenv("DISSIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, 1024));
  }
  return std::max(configured, 1);
}

std::filesystem::path checkpoint_path(const SweepConfig& config) {
  return config.directory / (config.name + ".checkpoint.json");
}

SweepResult run_sweep(const SweepConfig& config, const RunOptions& opts) {
  config.validate();
  SweepResult result;
  result.name = config.name;
  result.delta_axis = config.delta_grid.values();
  result.gamma_axis = config.gamma_grid.values();
  std::vector<analysis::CellSpec> jobs;
  for (double d : result.delta_axis)
    for (double g : result.gamma_axis) jobs.push_back(make_job(config, config.model.n_spins, d, g));

  result.provenance = {config.hash(), DISSIM_VERSION, utc_timestamp()};
  result.cells = run_jobs(jobs, config, checkpoint_path(config), result.provenance.config_hash, opts, result.recomputed);
  return result;
}

SweepResult run_scaling(const SweepConfig& config, const std::vector<int>& n_list, const RunOptions& opts) {
  config.validate();
  if (config.delta_grid.count != 1 || config.gamma_grid.count != 1)
    throw ArgumentError("scaling runs need single-point delta and gamma grids");
  if (n_list.empty()) throw ArgumentError("the N list is empty");
  SweepResult result;
  result.name = config.name;
  result.delta_axis = {config.delta_grid.min};
  result.gamma_axis = {config.gamma_grid.min};
  std::string key = config.hash();
  std::vector<analysis::CellSpec> jobs;
  for (int n : n_list) {
    SweepConfig probe = config;
    probe.model.n_spins = n;
    probe.validate();
    jobs.push_back(make_job(config, n, config.delta_grid.min, config.gamma_grid.min));
    key += "," + std::to_string(n);
  }
  result.provenance = {detail::sha256_hex(key), DISSIM_VERSION, utc_timestamp()};
  const auto checkpoint = config.directory / (config.name + ".scaling.checkpoint.json");
  result.cells = run_jobs(jobs, config, checkpoint, result.provenance.config_hash, opts, result.recomputed);
  return result;
}

}  // namespace dissim::sweep
