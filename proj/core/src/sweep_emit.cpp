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
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "dissim/error.hpp"
#include "dissim/sweep.hpp"
#include "hash.hpp"

namespace dissim::sweep {

namespace {

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("nan");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ArgumentError("bad integer '" + std::string(s) + "'");
  return v;
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

std::optional<double> optional_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ArgumentError("bad number '" + std::string(s) + "'");
  return v;
}

nlohmann::json CellRecord::to_json() const {
  return {{"delta", delta},
          {"gamma", gamma},
          {"n", n},
          {"alpha", alpha},
          {"engine", std::string(analysis::to_string(engine))},
          {"tau", tau},
          {"p", p},
          {"m_f", m_f},
          {"norm_c", optional_json(norm_c)},
          {"norm_chi", optional_json(norm_chi)},
          {"converged", converged},
          {"wall_seconds", wall_seconds},
          {"error", error}};
}

CellRecord CellRecord::from_json(const nlohmann::json& j) {
  CellRecord r;
  r.delta = j.at("delta");
  r.gamma = j.at("gamma");
  r.n = j.at("n");
  r.alpha = j.at("alpha");
  r.engine = analysis::parse_engine(j.at("engine").get<std::string>());
  r.tau = j.at("tau");
  r.p = j.at("p");
  r.m_f = j.at("m_f");
  r.norm_c = optional_from(j.at("norm_c"));
  r.norm_chi = optional_from(j.at("norm_chi"));
  r.converged = j.at("converged");
  r.wall_seconds = j.at("wall_seconds");
  r.error = j.value("error", "");
  return r;
}

bool SweepResult::all_converged() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellRecord& c) { return c.converged; });
}

std::string to_csv(const SweepResult& result) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& c : result.cells) {
    out += format_double(c.delta) + ',' + format_double(c.gamma) + ',' + std::to_string(c.n) + ',' +
           format_double(c.alpha) + ',' + std::string(analysis::to_string(c.engine)) + ',' + format_double(c.tau) +
           ',' + format_double(c.p) + ',' + format_double(c.m_f) + ',' + optional_field(c.norm_c) + ',' +
           optional_field(c.norm_chi) + ',' + (c.converged ? "true" : "false") + ',' + format_double(c.wall_seconds) +
           '\n';
  }
  return out;
}

std::vector<CellRecord> parse_csv(std::string_view text) {
  std::vector<CellRecord> cells;
  std::size_t pos = text.find('\n');
  if (text.substr(0, pos) != kCsvHeader) throw ArgumentError("CSV header does not match the sweep contract");
  while (pos != std::string_view::npos && pos + 1 < text.size()) {
    const std::size_t next = text.find('\n', pos + 1);
    const auto line = text.substr(pos + 1, next == std::string_view::npos ? std::string_view::npos : next - pos - 1);
    pos = next;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 12) throw ArgumentError("CSV row has " + std::to_string(f.size()) + " fields, expected 12");
    CellRecord r;
    r.delta = parse_double(f[0]);
    r.gamma = parse_double(f[1]);
    r.n = parse_int(f[2]);
    r.alpha = parse_double(f[3]);
    r.engine = analysis::parse_engine(f[4]);
    r.tau = parse_double(f[5]);
    r.p = parse_double(f[6]);
    r.m_f = parse_double(f[7]);
    if (f[8] != "nan") r.norm_c = parse_double(f[8]);
    if (f[9] != "nan") r.norm_chi = parse_double(f[9]);
    if (f[10] != "true" && f[10] != "false") throw ArgumentError("converged must be true or false");
    r.converged = f[10] == "true";
    r.wall_seconds = parse_double(f[11]);
    cells.push_back(r);
  }
  return cells;
}

nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : result.cells) cells.push_back(c.to_json());
  return {{"name", result.name},
          {"delta_axis", result.delta_axis},
          {"gamma_axis", result.gamma_axis},
          {"cells", std::move(cells)},
          {"provenance",
           {{"config_hash", result.provenance.config_hash},
            {"version", result.provenance.version},
            {"timestamp", result.provenance.timestamp}}}};
}

std::string correlations_csv(const analysis::CorrelationSet& set) {
  std::string out(kCorrelationHeader);
  out += '\n';
  for (std::size_t k = 0; k < set.t_grid.size(); ++k)
    out += format_double(set.t_grid[k]) + ',' + format_double(set.c_xy[k]) + ',' + format_double(set.c_yx[k]) + ',' +
           format_double(set.chi_xy[k]) + ',' + format_double(set.chi_yx[k]) + '\n';
  return out;
}

std::vector<std::filesystem::path> emit(const SweepResult& result, const std::filesystem::path& directory,
                                        const std::vector<std::string>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create output directory " + directory.string());
  std::vector<std::filesystem::path> written;
  for (const auto& f : formats) {
    const auto path = directory / (result.name + "." + f);
    if (f == "csv") detail::write_atomically(path, to_csv(result));
    else if (f == "json") detail::write_atomically(path, to_json(result).dump(2) + "\n");
    else throw ArgumentError("unknown output format '" + f + "'");
    written.push_back(path);
  }
  return written;
}

}  // namespace dissim::sweep
