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


#include "nhq/trajectories.hpp"

#include "nhq/errors.hpp"
#include "nhq/open_system.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

namespace nhq::traj {
namespace {

constexpr double kSigma = 4.0;

TEST(Seeds, DeterministicAndDistinct) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s) {
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, s, i));
  }
  EXPECT_EQ(seen.size(), 4000u);
}

TEST(Rng, UniformOnUnitInterval) {
  Rng rng(5);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, kSigma * std::sqrt(1.0 / 12.0 / n));
}

TEST(Models, Structure) {
  const open::IonParams ion = open::ion_for_gamma(1.0, 0.5, 10.0);
  const JumpModel full = full_model(ion);
  EXPECT_EQ(full.jumps.size(), 4u);
  EXPECT_DOUBLE_EQ(full.max_rate, ion.total_width());
  const JumpModel elim = eliminated_model(ion);
  double loss = 0.0;
  for (const auto& j : elim.jumps) loss += j.rate;
  EXPECT_NEAR(loss, 4.0 * 0.5, 1e-12);
  const JumpModel eff = effective_model(qubit::NHParams(1.0, 0.5));
  ASSERT_EQ(eff.jumps.size(), 1u);
  EXPECT_DOUBLE_EQ(eff.jumps[0].rate, 2.0);
  const JumpModel twin = backflow_as_loss(elim);
  for (const auto& j : twin.jumps) EXPECT_TRUE(is_detectable(j.channel));
  EXPECT_EQ(twin.h_eff, elim.h_eff);
}

TEST(Segment, StepContract) {
  const JumpModel m = effective_model(qubit::NHParams(1.0, 0.5));
  EXPECT_DOUBLE_EQ(m.default_dt(), 0.005);
  EXPECT_THROW(make_segment(m, 1.0, 0.006), std::invalid_argument);
  EXPECT_THROW(make_segment(m, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(make_segment(m, -1.0, 0.001), std::invalid_argument);
  const Segment s = make_segment(m, 1.0, 0.005);
  EXPECT_EQ(s.steps, 200);
  EXPECT_DOUBLE_EQ(s.step_dt, 0.005);
  EXPECT_EQ(make_segment(m, 0.0, 0.005).steps, 0);
}

TEST(Advance, NoJumpModelIsDeterministicPropagation) {
  const qubit::NHParams p(1.0, 0.0);
  const JumpModel m = effective_model(p);
  const auto rec = run_trajectory(m, qubit::QubitState::down(), 1.2, m.default_dt(), 9);
  EXPECT_TRUE(rec.post_selected);
  EXPECT_TRUE(rec.jumps.empty());
  EXPECT_NEAR(std::norm(rec.final_state(0)), std::pow(std::sin(1.2), 2), 1e-12);
}

TEST(Advance, DetectableJumpFreezesInGround) {
  const JumpModel m = effective_model(qubit::NHParams(1.0, 3.0));
  bool saw_jump = false;
  for (std::uint64_t s = 0; s < 50 && !saw_jump; ++s) {
    const auto rec = run_trajectory(m, qubit::QubitState::down(), 2.0, m.default_dt(), s);
    if (!rec.post_selected) {
      saw_jump = true;
      ASSERT_EQ(rec.jumps.size(), 1u);
      EXPECT_EQ(rec.jumps[0].channel, Channel::kToGround);
      EXPECT_NEAR(std::norm(rec.final_state(open::kGround)), 1.0, 1e-15);
    }
  }
  EXPECT_TRUE(saw_jump);
}

TEST(Estimate, EffectiveModelMatchesClosedForm) {
  const qubit::NHParams p(1.0, 0.5);
  const JumpModel m = effective_model(p);
  const std::size_t n = 20000;
  for (double t : {0.5, 1.5}) {
    const auto e = estimate(m, qubit::QubitState::up(), Basis::kZ, t, n, 77);
    const auto exact = open::no_jump_conditional(p, qubit::QubitState::up(), t);
    ASSERT_TRUE(e.p_down);
    EXPECT_NEAR(e.p_down->value, exact.state.prob_down(), kSigma * e.p_down->error + 2e-3);
    EXPECT_NEAR(e.fraction_selected.value, exact.survival,
                kSigma * e.fraction_selected.error + 2e-3);
  }
}

TEST(Estimate, XBasisReadout) {
  const qubit::NHParams p(1.0, 0.3);
  const JumpModel m = effective_model(p);
  const double t = 0.8;
  const auto e = estimate(m, qubit::QubitState::up(), Basis::kX, t, 20000, 3);
  ASSERT_TRUE(e.p_minus);
  const qubit::QubitState s = qubit::evolve(p, qubit::QubitState::up(), t);
  const double exact = s.fidelity(qubit::QubitState::minus());
  EXPECT_NEAR(e.p_minus->value, exact, kSigma * e.p_minus->error + 2e-3);
  EXPECT_NEAR(down_probability(embed(qubit::QubitState::minus()), Basis::kX), 1.0, 1e-15);
  EXPECT_NEAR(down_probability(embed(qubit::QubitState::plus()), Basis::kX), 0.0, 1e-15);
}

TEST(Estimate, FullModelMatchesLindbladPopulations) {
  const open::IonParams ion = open::ion_for_gamma(1.0, 0.3, 10.0);
  const JumpModel m = full_model(ion);
  const double t = 1.0;
  const auto avg = unconditioned_populations(m, qubit::QubitState::up(), t, 4000, 11);
  const auto rho = open::evolve_density(open::build_lindbladian_4(ion),
                                        open::DensityMatrix::from_qubit(qubit::QubitState::up(), 4),
                                        t);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(avg.mean(k), rho.population(k), kSigma * avg.error(k) + 5e-3) << "level " << k;
  }
}

TEST(Estimate, EliminatedModelMatchesLindbladReadout) {
  const open::IonParams ion = open::ion_for_gamma(1.0, 0.4, 100.0);
  const JumpModel m = eliminated_model(ion);
  const double t = 2.0;
  const auto e = estimate(m, qubit::QubitState::up(), Basis::kZ, t, 20000, 21);
  const auto rho = open::evolve_density(open::build_lindbladian_4(ion),
                                        open::DensityMatrix::from_qubit(qubit::QubitState::up(), 4),
                                        t);
  ASSERT_TRUE(e.p_down);
  EXPECT_NEAR(e.p_down->value, rho.qubit_p_down(), kSigma * e.p_down->error + 5e-3);
}

TEST(Estimate, IndependentOfWorkerCount) {
  const JumpModel m = effective_model(qubit::NHParams(1.0, 0.7));
  const auto a = estimate(m, qubit::QubitState::up(), Basis::kZ, 1.0, 3000, 5, {0.0, 1});
  const auto b = estimate(m, qubit::QubitState::up(), Basis::kZ, 1.0, 3000, 5, {0.0, 4});
  EXPECT_EQ(a.n_selected, b.n_selected);
  EXPECT_EQ(a.p_down->successes, b.p_down->successes);
}

TEST(Estimate, EmptyEnsembleThrows) {
  const JumpModel m = effective_model(qubit::NHParams(1.0, 5.0));
  try {
    estimate(m, qubit::QubitState::down(), Basis::kZ, 20.0, 50, 1);
    FAIL() << "expected EmptyEnsembleError";
  } catch (const EmptyEnsembleError& e) {
    EXPECT_EQ(e.fraction_selected(), 0.0);
  }
  EXPECT_THROW(estimate(m, qubit::QubitState::down(), Basis::kZ, 1.0, 0, 1),
               std::invalid_argument);
}

TEST(EstimateSeries, EmptyPointsCarryNoProbability) {
  const JumpModel m = effective_model(qubit::NHParams(1.0, 5.0));
  const std::vector<double> grid = {0.0, 20.0};
  const auto s = estimate_series(m, qubit::QubitState::down(), Basis::kZ, grid, 50, 2);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_TRUE(s[0].p_down);
  EXPECT_FALSE(s[1].p_down);
}

TEST(MeasureObservable, CollapsesAndFollowsBornRule) {
  Rng rng(8);
  const Operator2 z = numerics::pauli_z();
  int ups = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    State psi = embed(qubit::QubitState::bloch(1.0, 0.3));
    const int a = measure_observable(z, psi, rng);
    ups += a == 1;
    EXPECT_NEAR(std::norm(psi(a == 1 ? 0 : 1)), 1.0, 1e-14);
  }
  const double p = std::pow(std::cos(0.5), 2);
  EXPECT_NEAR(static_cast<double>(ups) / n, p, kSigma * std::sqrt(p * (1 - p) / n));
}

TEST(BackflowDeviation, VanishesWithoutBackflow) {
  const open::IonParams ion = open::without_backflow(open::ion_for_gamma(1.0, 0.5, 100.0));
  const std::vector<double> grid = {1.0, 3.0};
  for (const auto& d : backflow_deviation(ion, grid, 2000, 4)) {
    EXPECT_EQ(d.deviation, 0.0);
    EXPECT_EQ(d.n_with, d.n_without);
  }
}

TEST(BackflowDeviation, PairedShotsAgreeBeforeAnyBackflow) {
  const open::IonParams ion = open::ion_for_gamma(1.0, 0.3, 100.0);
  const std::vector<double> grid = {0.2};
  const auto d = backflow_deviation(ion, grid, 5000, 6).front();
  // Backflow jumps are rare at short times; almost every pair is identical.
  EXPECT_LT(std::abs(d.deviation), 0.01);
  EXPECT_GE(d.n_with, d.n_without);
  EXPECT_LT(d.error, 0.01);
}

TEST(Binomial, Estimate) {
  const auto b = binomial(30, 100);
  EXPECT_DOUBLE_EQ(b.value, 0.3);
  EXPECT_NEAR(b.error, std::sqrt(0.3 * 0.7 / 100), 1e-15);
}

}  // namespace
}  // namespace nhq::traj
