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
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dissim/error.hpp"
#include "dissim/permsym.hpp"
#include "hash.hpp"

namespace dissim::permsym {

namespace {

static_assert(std::endian::native == std::endian::little, "matrix cache assumes a little-endian host");

constexpr char kMagic[8] = {'D', 'S', 'M', 'X', 'C', 'A', 'C', 'H'};
constexpr std::uint32_t kFormatVersion = 1;

const char* kind_name(MatrixKind k) {
  switch (k) {
    case MatrixKind::Liouvillian: return "liouvillian";
    case MatrixKind::FloquetMap: return "floquet-map";
    case MatrixKind::FloquetPropagator: return "floquet-propagator";
    case MatrixKind::LeftMultiplier: return "left-multiplier";
  }
  return "unknown";
}

nlohmann::json params_json(MatrixKind kind, const MatrixParams& p) {
  return {{"kind", kind_name(kind)}, {"n_spins", p.n_spins}, {"delta", p.delta},   {"j0", p.j0},
          {"gamma_e", p.gamma_e},    {"gamma_d", p.gamma_d}, {"tau", p.tau},       {"p", p.p},
          {"op_axis", p.op_axis},    {"format_version", kFormatVersion}};
}

template <typename T>
void put(std::string& buf, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.append(bytes, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T value;
  if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) throw IoError("truncated matrix cache file");
  return value;
}

std::filesystem::path sidecar(const std::filesystem::path& path) {
  auto s = path;
  s += ".json";
  return s;
}

}  // namespace

void save_matrix(const std::filesystem::path& path, const PermSuperMatrix& m) {
  std::string buf(kMagic, sizeof(kMagic));
  put<std::uint32_t>(buf, kFormatVersion);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.kind));
  put<std::int64_t>(buf, m.matrix.rows());
  put<std::int64_t>(buf, m.matrix.cols());
  put<std::int64_t>(buf, m.matrix.nonZeros());
  for (Eigen::Index c = 0; c < m.matrix.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m.matrix, c); it; ++it) {
      put<std::int64_t>(buf, it.row());
      put<std::int64_t>(buf, it.col());
      put<double>(buf, it.value().real());
      put<double>(buf, it.value().imag());
    }
  detail::write_atomically(path, buf);
  nlohmann::json meta = params_json(m.kind, m.params);
  meta["rows"] = m.matrix.rows();
  meta["nnz"] = m.matrix.nonZeros();
  detail::write_atomically(sidecar(path), meta.dump(2) + "\n");
}

PermSuperMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  char magic[sizeof(kMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError(path.string() + " is not a matrix cache file");
  if (get<std::uint32_t>(is) != kFormatVersion) throw IoError(path.string() + " has an unsupported format version");
  PermSuperMatrix m;
  const auto kind = get<std::uint32_t>(is);
  if (kind > static_cast<std::uint32_t>(MatrixKind::LeftMultiplier)) throw IoError("bad matrix kind in cache file");
  m.kind = static_cast<MatrixKind>(kind);
  const auto rows = get<std::int64_t>(is), cols = get<std::int64_t>(is), nnz = get<std::int64_t>(is);
  if (rows < 0 || cols < 0 || nnz < 0) throw IoError("bad matrix header in cache file");
  std::vector<Eigen::Triplet<cd>> t;
  t.reserve(static_cast<std::size_t>(nnz));
  for (std::int64_t k = 0; k < nnz; ++k) {
    const auto r = get<std::int64_t>(is), c = get<std::int64_t>(is);
    const double re = get<double>(is), im = get<double>(is);
    if (r < 0 || r >= rows || c < 0 || c >= cols) throw IoError("triplet out of range in cache file");
    t.emplace_back(r, c, cd(re, im));
  }
  m.matrix.resize(rows, cols);
  m.matrix.setFromTriplets(t.begin(), t.end());

  std::ifstream js(sidecar(path));
  if (js) {
    const auto meta = nlohmann::json::parse(js);
    m.params.n_spins = meta.at("n_spins");
    m.params.delta = meta.at("delta");
    m.params.j0 = meta.at("j0");
    m.params.gamma_e = meta.at("gamma_e");
    m.params.gamma_d = meta.at("gamma_d");
    m.params.tau = meta.at("tau");
    m.params.p = meta.at("p");
    m.params.op_axis = meta.at("op_axis");
  }
  return m;
}

MatrixCache::MatrixCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) throw IoError("cannot create cache directory " + directory_.string());
}

std::filesystem::path MatrixCache::path_for(MatrixKind kind, const MatrixParams& params) const {
  const std::string key = detail::sha256_hex(params_json(kind, params).dump()).substr(0, 16);
  return directory_ / (std::string(kind_name(kind)) + "-n" + std::to_string(params.n_spins) + "-" + key + ".bin");
}

PermSuperMatrix MatrixCache::get_or_build(MatrixKind kind, const MatrixParams& params,
                                          const std::function<PermSuperMatrix()>& build) {
  const auto path = path_for(kind, params);
  if (std::filesystem::exists(path)) {
    try {
      PermSuperMatrix m = load_matrix(path);
      if (m.kind == kind && params_json(kind, m.params) == params_json(kind, params)) return m;
    } catch (const IoError&) {
    } catch (const nlohmann::json::exception&) {
    }
  }
  PermSuperMatrix m = build();
  save_matrix(path, m);
  return m;
}

}  // namespace dissim::permsym
