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
#include <fstream>
#include <set>

#include "dissim/dense.hpp"
#include "dissim/error.hpp"
#include "dissim/sweep.hpp"
#include "hash.hpp"

namespace dissim::sweep {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> known) {
  if (!obj.is_object()) throw ArgumentError(std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ArgumentError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ArgumentError(std::string(where) + "." + key + " has the wrong type");
  }
}

GridAxis read_axis(const json& obj, std::string_view where, GridAxis axis) {
  reject_unknown(obj, where, {"min", "max", "count", "spacing"});
  read(obj, "min", axis.min, where);
  read(obj, "max", axis.max, where);
  read(obj, "count", axis.count, where);
  read(obj, "spacing", axis.spacing, where);
  return axis;
}

json axis_json(const GridAxis& a) {
  return {{"min", a.min}, {"max", a.max}, {"count", a.count}, {"spacing", a.spacing}};
}

void check_axis(const GridAxis& a, std::string_view where) {
  if (a.count < 1) throw ArgumentError(std::string(where) + ".count must be at least 1");
  if (!std::isfinite(a.min) || !std::isfinite(a.max) || a.min > a.max)
    throw ArgumentError(std::string(where) + " needs finite min <= max");
  if (a.spacing != "linear") throw ArgumentError(std::string(where) + ".spacing must be 'linear'");
}

}  // namespace

std::vector<double> GridAxis::values() const {
  if (count == 1) return {min};
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) v[k] = k == count - 1 ? max : min + (max - min) * k / (count - 1);
  return v;
}

SweepConfig SweepConfig::from_json(const json& doc) {
  reject_unknown(doc, "config", {"name", "engine", "model", "delta_grid", "gamma_grid", "floquet", "correlations",
                                 "fast", "outputs", "run"});
  SweepConfig c;
  read(doc, "name", c.name, "config");
  std::string engine = "meanfield";
  read(doc, "engine", engine, "config");
  c.engine = analysis::parse_engine(engine);

  const bool permsym_like = c.engine == analysis::Engine::Permsym || c.engine == analysis::Engine::FloquetPermsym;
  const bool dense_like = c.engine == analysis::Engine::Dense || c.engine == analysis::Engine::FloquetDense;
  c.model.n_spins = permsym_like ? 50 : 10;
  const int points = permsym_like ? 41 : 21;
  c.delta_grid = {0.0, 2.0, points, "linear"};
  c.gamma_grid = {0.0, 2.0, points, "linear"};
  if (dense_like) c.model.alpha = 1.0;

  if (doc.contains("model")) {
    const auto& m = doc.at("model");
    reject_unknown(m, "model", {"n", "alpha", "j_sign"});
    read(m, "n", c.model.n_spins, "model");
    read(m, "alpha", c.model.alpha, "model");
    read(m, "j_sign", c.model.j_sign, "model");
  }
  if (doc.contains("delta_grid")) c.delta_grid = read_axis(doc.at("delta_grid"), "delta_grid", c.delta_grid);
  if (doc.contains("gamma_grid")) c.gamma_grid = read_axis(doc.at("gamma_grid"), "gamma_grid", c.gamma_grid);
  if (doc.contains("floquet")) {
    const auto& f = doc.at("floquet");
    reject_unknown(f, "floquet", {"tau"});
    double tau = 0.0;
    read(f, "tau", tau, "floquet");
    c.tau = tau;
  }
  read(doc, "correlations", c.correlations, "config");
  read(doc, "fast", c.fast, "config");
  if (doc.contains("outputs")) {
    const auto& o = doc.at("outputs");
    reject_unknown(o, "outputs", {"directory", "formats"});
    std::string dir = c.directory.string();
    read(o, "directory", dir, "outputs");
    c.directory = dir;
    read(o, "formats", c.formats, "outputs");
  }
  if (doc.contains("run")) {
    const auto& r = doc.at("run");
    reject_unknown(r, "run", {"workers", "seed", "checkpoint_interval"});
    read(r, "workers", c.workers, "run");
    read(r, "seed", c.seed, "run");
    read(r, "checkpoint_interval", c.checkpoint_interval, "run");
  }
  c.validate();
  return c;
}

SweepConfig SweepConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ArgumentError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

json SweepConfig::to_json() const {
  json doc = {{"name", name},
              {"engine", std::string(analysis::to_string(engine))},
              {"model", {{"n", model.n_spins}, {"alpha", model.alpha}, {"j_sign", model.j_sign}}},
              {"delta_grid", axis_json(delta_grid)},
              {"gamma_grid", axis_json(gamma_grid)},
              {"correlations", correlations},
              {"fast", fast},
              {"outputs", {{"directory", directory.string()}, {"formats", formats}}},
              {"run", {{"workers", workers}, {"seed", seed}, {"checkpoint_interval", checkpoint_interval}}}};
  if (tau) doc["floquet"] = {{"tau", *tau}};
  return doc;
}

void SweepConfig::validate() const {
  if (name.empty() || name.find('/') != std::string::npos) throw ArgumentError("name must be a plain file stem");
  try {
    model::ModelSpec probe = model;
    probe.delta = 0.0;
    probe.validate();
  } catch (const ArgumentError& e) {
    throw ArgumentError(std::string("model: ") + e.what());
  }
  check_axis(delta_grid, "delta_grid");
  check_axis(gamma_grid, "gamma_grid");
  if (gamma_grid.min < 0.0) throw ArgumentError("gamma_grid must be non-negative");
  const bool permsym_like = engine == analysis::Engine::Permsym || engine == analysis::Engine::FloquetPermsym;
  if (permsym_like && model.alpha != 0.0) throw ArgumentError("the permsym engines require model.alpha = 0");
  const bool dense_like = engine == analysis::Engine::Dense || engine == analysis::Engine::FloquetDense;
  if (dense_like && model.n_spins > dense::kDefaultMaxSpins)
    throw ArgumentError("dense engines are capped at n = " + std::to_string(dense::kDefaultMaxSpins));
  if (analysis::is_floquet(engine)) {
    if (!tau || !(*tau > 0.0) || !std::isfinite(*tau)) throw ArgumentError("floquet.tau > 0 is required");
  } else if (tau) {
    throw ArgumentError("floquet block given for a continuous engine");
  }
  if (formats.empty()) throw ArgumentError("outputs.formats must not be empty");
  for (const auto& f : formats)
    if (f != "csv" && f != "json") throw ArgumentError("unknown output format '" + f + "'");
  if (workers < 1) throw ArgumentError("run.workers must be at least 1");
  if (checkpoint_interval < 1) throw ArgumentError("run.checkpoint_interval must be at least 1");
}

std::string SweepConfig::hash() const {
  // Run and output settings do not change results, so they stay out of the key
  // and a resume with a different worker count still matches.
  json doc = to_json();
  doc.erase("run");
  doc.erase("outputs");
  return detail::sha256_hex(doc.dump());
}

}  // namespace dissim::sweep
