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
#include <benchmark/benchmark.h>

#include "dissim/analysis.hpp"
#include "dissim/dense.hpp"
#include "dissim/permsym.hpp"

namespace {

using namespace dissim;

model::ModelSpec chain(int n, double alpha, double delta) {
  model::ModelSpec s;
  s.n_spins = n;
  s.alpha = alpha;
  s.delta = delta;
  return s;
}

void BM_DenseLiouvillianApply(benchmark::State& state) {
  const auto spec = chain(static_cast<int>(state.range(0)), 1.0, 0.5);
  const auto h = dense::build_hamiltonian(spec, model::build_coupling_matrix(spec));
  const auto l = dense::build_liouvillian(h, {1.0, 1.0});
  const Eigen::MatrixXcd x = Eigen::MatrixXcd::Random(l.hilbert_dim(), l.hilbert_dim());
  Eigen::MatrixXcd y;
  for (auto _ : state) {
    l.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * l.dim());
}
BENCHMARK(BM_DenseLiouvillianApply)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_DenseLiouvillianApplyReal(benchmark::State& state) {
  const auto spec = chain(static_cast<int>(state.range(0)), 1.0, 0.5);
  const auto h = dense::build_hamiltonian(spec, model::build_coupling_matrix(spec));
  const auto l = dense::build_liouvillian(h, {1.0, 1.0});
  const Eigen::VectorXd x = Eigen::VectorXd::Random(l.dim());
  Eigen::VectorXd y(l.dim());
  for (auto _ : state) {
    l.apply_real(x.data(), y.data());
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_DenseLiouvillianApplyReal)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_DenseSteadyState(benchmark::State& state) {
  const auto spec = chain(static_cast<int>(state.range(0)), 1.0, 0.5);
  const auto h = dense::build_hamiltonian(spec, model::build_coupling_matrix(spec));
  const auto l = dense::build_liouvillian(h, {1.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(dense::steady_state_dense(l).info.residual);
}
BENCHMARK(BM_DenseSteadyState)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_PermsymBuild(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const permsym::PermBasis basis(n);
  const auto spec = chain(n, 0.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(permsym::build_liouvillian_perm(spec, {1.0, 1.0}, basis).matrix.nonZeros());
  state.counters["D"] = static_cast<double>(basis.size());
}
BENCHMARK(BM_PermsymBuild)->Arg(10)->Arg(30)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_PermsymSteadyState(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const permsym::PermBasis basis(n);
  const auto l = permsym::build_liouvillian_perm(chain(n, 0.0, 0.5), {1.0, 1.0}, basis);
  for (auto _ : state) benchmark::DoNotOptimize(permsym::steady_state_perm(l, basis).info.residual);
}
BENCHMARK(BM_PermsymSteadyState)->Arg(10)->Arg(30)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_PermsymFloquetSteadyState(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const permsym::PermBasis basis(n);
  const double tau = 0.1;
  const permsym::FloquetOperator k(permsym::build_generator_perm(basis, 0.5, 1.0 / (n - 1), {}),
                                   permsym::floquet_map_perm(basis, tau), tau);
  permsym::FloquetSolveOptions opts;
  opts.spectral_steps = 0;
  for (auto _ : state) benchmark::DoNotOptimize(permsym::steady_state_floquet_perm(k, basis, opts).info.residual);
}
BENCHMARK(BM_PermsymFloquetSteadyState)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_PermsymCorrelations(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  analysis::CellSpec cell;
  cell.engine = analysis::Engine::Permsym;
  cell.model = chain(n, 0.0, 0.5);
  cell.gamma = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(analysis::evaluate_cell(cell).m_f);
}
BENCHMARK(BM_PermsymCorrelations)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
