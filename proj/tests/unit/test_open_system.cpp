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


#include "nhq/open_system.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace nhq::open {
namespace {

using testing::max_abs;

std::vector<double> grid(double hi, int n) {
  std::vector<double> g(n + 1);
  for (int i = 0; i <= n; ++i) g[i] = hi * i / n;
  return g;
}

TEST(Branching, DefaultsAndValidation) {
  Branching b;
  EXPECT_NO_THROW(b.validate());
  EXPECT_NEAR(b.ground + b.backflow + b.d3, 1.0, 1e-12);
  b.ground = 0.5;
  EXPECT_THROW(b.validate(), std::invalid_argument);
}

TEST(IonParams, EffectiveGamma) {
  const IonParams p = ion_for_gamma(1.0, 0.37, 100.0);
  EXPECT_NEAR(p.effective_gamma(), 0.37, 1e-14);
  EXPECT_NEAR(p.total_width(), 100.0 * p.J_A, 1e-10);
  EXPECT_TRUE(p.has_backflow());
  const IonParams q = without_backflow(p);
  EXPECT_FALSE(q.has_backflow());
  EXPECT_NEAR(q.total_width(), p.total_width(), 1e-12);
  EXPECT_NEAR(q.effective_gamma(), 0.37, 1e-14);
  EXPECT_NEAR(effective_gamma(3.0, 9.0), 1.0, 1e-15);
  EXPECT_THROW(effective_gamma(1.0, 0.0), std::invalid_argument);
  EXPECT_EQ(ion_for_gamma(1.0, 0.0, 100.0).effective_gamma(), 0.0);
}

TEST(DensityMatrix, Validation) {
  EXPECT_THROW(DensityMatrix(ComplexMatrix::Identity(2, 2)), std::invalid_argument);
  EXPECT_THROW(DensityMatrix(ComplexMatrix::Identity(5, 5) / 5.0), std::invalid_argument);
  ComplexMatrix nh = ComplexMatrix::Identity(2, 2) / 2.0;
  nh(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix{nh}, std::invalid_argument);
  const auto rho = DensityMatrix::from_qubit(qubit::QubitState::plus(), 4);
  EXPECT_EQ(rho.dim(), 4);
  EXPECT_NEAR(rho.trace(), 1.0, 1e-15);
  EXPECT_NEAR(rho.qubit_p_down(), 0.5, 1e-15);
  EXPECT_NEAR(rho.min_eigenvalue(), 0.0, 1e-14);
}

TEST(Lindblad4, MatchesDirectOdeIntegration) {
  const IonParams p = ion_for_gamma(1.0, 0.5, 10.0);
  const auto l = build_lindbladian_4(p);
  const auto h = hamiltonian_4(p);
  const auto jumps = jump_operators_4(p);
  const auto rho0 = DensityMatrix::from_qubit(qubit::QubitState::up(), 4);
  const std::function<ComplexMatrix(const ComplexMatrix&)> f = [&](const ComplexMatrix& r) {
    return numerics::lindblad_rhs(h, jumps, r);
  };
  const double t = 1.5;
  const ComplexMatrix ode = testing::rk4<ComplexMatrix>(f, rho0.matrix(), t, 60000);
  EXPECT_LT(max_abs(evolve_density(l, rho0, t).matrix() - ode), 1e-9);
}

TEST(Lindblad4, PhysicalStateAtAllTimes) {
  const IonParams p = ion_for_gamma(1.0, 0.73, 30.0);
  const auto l = build_lindbladian_4(p);
  const auto rho0 = DensityMatrix::from_qubit(qubit::QubitState::bloch(0.4, 1.0), 4);
  const auto g = grid(8.0, 40);
  for (const auto& rho : evolve_density(l, rho0, g)) {
    EXPECT_NEAR(rho.trace(), 1.0, 1e-11);
    EXPECT_GT(rho.min_eigenvalue(), -1e-11);
  }
}

TEST(Lindblad4, GroundStateIsAbsorbingWithoutBackflow) {
  const IonParams p = without_backflow(ion_for_gamma(1.0, 0.5, 20.0));
  const auto late = evolve_density(build_lindbladian_4(p),
                                   DensityMatrix::from_qubit(qubit::QubitState::up(), 4), 60.0);
  EXPECT_NEAR(late.population(kGround), 1.0, 1e-8);
}

TEST(Lindblad4, BackflowReturnsPopulationToTheQubit) {
  const IonParams with = ion_for_gamma(1.0, 0.5, 20.0);
  const IonParams without = without_backflow(with);
  const auto rho0 = DensityMatrix::from_qubit(qubit::QubitState::down(), 4);
  const double q_with = evolve_density(build_lindbladian_4(with), rho0, 3.0).qubit_weight();
  const double q_without = evolve_density(build_lindbladian_4(without), rho0, 3.0).qubit_weight();
  EXPECT_GT(q_with, q_without);
}

TEST(Lindblad3, NoJumpBranchIsTheNonHermitianQubit) {
  // Populations of the qubit block follow the no-jump evolution exactly,
  // because |g> never feeds back.
  for (double g : {0.18, 0.5, 1.0, 1.7}) {
    const qubit::NHParams p(1.0, g);
    for (const auto& psi : {qubit::QubitState::up(), qubit::QubitState::plus()}) {
      EXPECT_LT(three_level_deviation(p, psi, grid(3.0, 60), kLossRatePerGamma), 1e-11)
          << "gamma=" << g;
    }
  }
}

TEST(Lindblad3, OtherRateFactorsDisagree) {
  const qubit::NHParams p(1.0, 0.37);
  const auto g = grid(std::numbers::pi, 100);
  EXPECT_GT(three_level_deviation(p, qubit::QubitState::up(), g, 1.0), 0.05);
  EXPECT_GT(three_level_deviation(p, qubit::QubitState::up(), g, 2.0), 0.05);
}

TEST(NoJump, ReducedModelMatchesNormalizedPropagator) {
  const qubit::NHParams p(1.0, 0.6);
  for (double t : {0.2, 1.0, 2.5}) {
    const auto r = no_jump_conditional(p, qubit::QubitState::up(), t);
    EXPECT_NEAR(r.state.fidelity(qubit::evolve(p, qubit::QubitState::up(), t)), 1.0, 1e-12);
    const Eigen::Vector2cd v = qubit::propagator(p, t) * qubit::QubitState::up().amplitudes();
    EXPECT_NEAR(r.survival, std::exp(-2.0 * p.gamma() * t) * v.squaredNorm(), 1e-12);
  }
}

TEST(NoJump, FourLevelConvergesToReducedModel) {
  const double gamma = 0.5;
  double previous = 1.0;
  for (double ratio : {10.0, 30.0, 100.0}) {
    const IonParams ion = without_backflow(ion_for_gamma(1.0, gamma, ratio));
    const auto full = no_jump_conditional(ion, qubit::QubitState::up(), 2.0);
    const auto reduced = no_jump_conditional(qubit::NHParams(1.0, gamma), qubit::QubitState::up(), 2.0);
    const double err = std::abs(full.state.prob_down() - reduced.state.prob_down());
    EXPECT_LT(err, previous);
    previous = err;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(CompareModels, DeviationShrinksWithWidthRatio) {
  const auto g = grid(std::numbers::pi, 120);
  for (double gamma : {0.18, 0.37, 0.73}) {
    for (const auto& psi : {qubit::QubitState::up(), qubit::QubitState::down()}) {
      double previous = 1.0;
      for (double ratio : {10.0, 30.0, 100.0}) {
        const auto dev = compare_models(without_backflow(ion_for_gamma(1.0, gamma, ratio)), psi, g);
        EXPECT_LT(dev.max_four_vs_two, previous) << gamma << " " << ratio;
        EXPECT_LT(dev.max_three_vs_two, 1e-10);
        previous = dev.max_four_vs_two;
      }
      EXPECT_LT(previous, 1e-2);
    }
  }
}

TEST(CompareModels, RequiresSeparatedScales) {
  IonParams p = ion_for_gamma(1.0, 0.5, 5.0);
  const auto g = grid(1.0, 4);
  EXPECT_THROW(compare_models(p, qubit::QubitState::up(), g), std::invalid_argument);
}

TEST(CalibrateLossRate, FitsFour) {
  const auto cal = calibrate_loss_rate(qubit::NHParams(1.0, 0.37), qubit::QubitState::up(),
                                       grid(std::numbers::pi, 60));
  EXPECT_EQ(cal.assumed, 1.0);
  EXPECT_NEAR(cal.fitted, 4.0, 1e-6);
  EXPECT_LT(cal.deviation_fitted, 1e-8);
  EXPECT_GT(cal.deviation_assumed, 0.05);
}

}  // namespace
}  // namespace nhq::open
