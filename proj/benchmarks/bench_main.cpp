// Copyright 2026 The nhqubit Authors
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


#include "nhq/leggett_garg.hpp"
#include "nhq/nh_qubit.hpp"
#include "nhq/numerics.hpp"
#include "nhq/open_system.hpp"
#include "nhq/trajectories.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace nhq;

void BM_Expm16(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  Eigen::MatrixXcd a(16, 16);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = {n(rng), n(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(numerics::expm(a));
}
BENCHMARK(BM_Expm16);

void BM_K3ClosedForm(benchmark::State& state) {
  const qubit::NHParams p(1.0, 0.88);
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lg::k3(p, t));
    t += 1e-9;
  }
}
BENCHMARK(BM_K3ClosedForm);

void BM_K3Joint(benchmark::State& state) {
  const qubit::NHParams p(1.0, 0.88);
  const lg::LGProtocol proto;
  for (auto _ : state) benchmark::DoNotOptimize(lg::k3_joint(proto, p, 0.3));
}
BENCHMARK(BM_K3Joint);

void BM_K3MaxOverT(benchmark::State& state) {
  const qubit::NHParams p(1.0, 0.88);
  for (auto _ : state) benchmark::DoNotOptimize(lg::k3_max_over_t(p));
}
BENCHMARK(BM_K3MaxOverT)->Unit(benchmark::kMillisecond);

void BM_K3Optimized(benchmark::State& state) {
  const qubit::NHParams p(1.0, 2.0);
  const int resolution = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lg::k3_optimized(p, 0.8, resolution));
}
BENCHMARK(BM_K3Optimized)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TrajectoryEliminated(benchmark::State& state) {
  const auto model = traj::eliminated_model(open::ion_for_gamma(1.0, 0.73, 100.0));
  const auto psi = qubit::QubitState::up();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(traj::run_trajectory(model, psi, 5.0, model.default_dt(), seed++));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(5.0 / model.default_dt()));
}
BENCHMARK(BM_TrajectoryEliminated)->Unit(benchmark::kMicrosecond);

void BM_Lindblad4Evolve(benchmark::State& state) {
  const auto ion = open::without_backflow(open::ion_for_gamma(1.0, 0.37, 100.0));
  const auto generator = open::build_lindbladian_4(ion);
  const auto rho = open::DensityMatrix::from_qubit(qubit::QubitState::down(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(open::evolve_density(generator, rho, 1.0));
}
BENCHMARK(BM_Lindblad4Evolve)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
