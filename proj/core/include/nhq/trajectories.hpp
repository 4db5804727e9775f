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

#pragma once

// Quantum-jump unraveling of the ion models with post-selection
// bookkeeping. States live in the (|up>, |down>, |A>, |g>) basis for every
// model; the reduced models simply leave |A> empty.

#include "nhq/nh_qubit.hpp"
#include "nhq/numerics.hpp"
#include "nhq/open_system.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nhq::traj {

using State = Eigen::Matrix<cd, 4, 1>;
using Generator = Eigen::Matrix4cd;

enum class Channel { kToGround, kToD3, kBackUp, kBackDown };

/// Jumps that the experiment detects (and rejects on).
constexpr bool is_detectable(Channel c) noexcept {
  return c == Channel::kToGround || c == Channel::kToD3;
}

std::string_view to_string(Channel c);

/// L = sqrt(rate) |target><source|.
struct RankOneJump {
  Channel channel;
  Eigen::Index target;
  Eigen::Index source;
  double rate;
};

struct JumpModel {
  std::string name;
  Generator h_eff;  // H - (i/2) sum_k L_k^+ L_k
  std::vector<RankOneJump> jumps;
  double max_rate = 1.0;  // largest frequency scale; sets the step contract

  /// Step size 0.01 / max_rate.
  double default_dt() const noexcept { return 0.01 / max_rate; }
};

/// The 4-level ion with all four decay channels out of |A>.
JumpModel full_model(const open::IonParams& p);

/// |A> adiabatically eliminated: every channel becomes a jump out of |down>
/// with rate 4 J_A^2 gamma_k / width^2.
JumpModel eliminated_model(const open::IonParams& p);

/// Reduced model of the bare non-Hermitian qubit: loss 4 gamma from |down>.
JumpModel effective_model(const qubit::NHParams& p);

/// Twin of `model` where backflow jumps are detected losses at unchanged
/// rates. Shots run with the same seed on both models stay identical until
/// the first backflow jump.
JumpModel backflow_as_loss(const JumpModel& model);

/// Counter-based seed for shot `index` of stream `stream`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1) with 53 random bits (portable across standard libraries).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// A fixed-duration stretch of evolution split into equal steps.
struct Segment {
  double duration = 0.0;
  int steps = 0;
  double step_dt = 0.0;
  Generator propagator = Generator::Identity();  // expm(-i H_eff step_dt)
};

/// Throws std::invalid_argument if dt exceeds model.default_dt().
Segment make_segment(const JumpModel& model, double duration, double dt);

struct JumpEvent {
  double time;
  Channel channel;
};

struct LiveTrajectory {
  explicit LiveTrajectory(const State& psi0, std::uint64_t seed) : psi(psi0), rng(seed) {}

  State psi;
  double time = 0.0;
  bool post_selected = true;
  std::vector<JumpEvent> jumps;
  Rng rng;
};

/// Advances by one segment. Per step, channel k fires with probability
/// dt <psi|L_k^+ L_k|psi>; otherwise psi <- U psi / ||U psi||. A detectable
/// jump ends post-selection and freezes the trajectory in |g>.
void advance(const JumpModel& model, const Segment& segment, LiveTrajectory& traj);

State embed(const qubit::QubitState& psi);

enum class Basis { kZ, kX };

std::string_view to_string(Basis b);

/// Probability of the "down" outcome in the given basis (|down> for z, |->
/// for x), conditioned on the qubit manifold.
double down_probability(const State& psi, Basis basis);

/// Samples a z or x readout; true for the |down> / |-> outcome. The x basis
/// is read out as a pi/2 rotation about y followed by z.
bool read_out(const State& psi, Basis basis, Rng& rng);

/// Projective measurement of a dichotomous qubit observable. Returns the
/// outcome +-1 and collapses psi onto the matching eigenstate.
int measure_observable(const Operator2& observable, State& psi, Rng& rng);

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::vector<JumpEvent> jumps;
  bool post_selected = true;
  State final_state = State::Zero();
};

/// Deterministic in (model, psi0, t_final, dt, seed).
TrajectoryRecord run_trajectory(const JumpModel& model, const State& psi0, double t_final,
                                double dt, std::uint64_t seed);
TrajectoryRecord run_trajectory(const JumpModel& model, const qubit::QubitState& psi0,
                                double t_final, double dt, std::uint64_t seed);

struct BinomialEstimate {
  double value = 0.0;
  double error = 0.0;  // sqrt(p (1 - p) / n)
  std::size_t successes = 0;
  std::size_t trials = 0;
};

BinomialEstimate binomial(std::size_t successes, std::size_t trials);

struct EnsembleEstimate {
  std::size_t n_shots = 0;
  std::size_t n_selected = 0;
  BinomialEstimate fraction_selected;
  std::optional<BinomialEstimate> p_down;   // z-basis runs
  std::optional<BinomialEstimate> p_minus;  // x-basis runs
};

struct EnsembleOptions {
  double dt = 0.0;       // 0 selects model.default_dt()
  unsigned workers = 0;  // 0 selects numerics::default_workers()
};

/// n_shots independent post-selected runs read out at t. Throws
/// EmptyEnsembleError when no shot survives.
EnsembleEstimate estimate(const JumpModel& model, const qubit::QubitState& psi0, Basis basis,
                          double t, std::size_t n_shots, std::uint64_t seed,
                          const EnsembleOptions& options = {});

/// One independent ensemble per grid time; entries with no surviving shot
/// carry an empty probability instead of throwing.
std::vector<EnsembleEstimate> estimate_series(const JumpModel& model,
                                              const qubit::QubitState& psi0, Basis basis,
                                              std::span<const double> grid,
                                              std::size_t n_shots, std::uint64_t seed,
                                              const EnsembleOptions& options = {});

struct PopulationAverage {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Vector4d error = Eigen::Vector4d::Zero();
};

/// Level populations averaged over all trajectories, post-selected or not.
PopulationAverage unconditioned_populations(const JumpModel& model,
                                            const qubit::QubitState& psi0, double t,
                                            std::size_t n_shots, std::uint64_t seed,
                                            const EnsembleOptions& options = {});

struct PairedDeviation {
  double t = 0.0;
  double p_with = 0.0;     // post-selected p_down with backflow
  double p_without = 0.0;  // same shots, backflow detected instead
  double deviation = 0.0;  // p_with - p_without
  double error = 0.0;      // paired delta-method standard error
  std::size_t n_with = 0;
  std::size_t n_without = 0;
};

/// Post-selected p_down(t) with and without backflow for shots sharing seeds.
std::vector<PairedDeviation> backflow_deviation(const JumpModel& model,
                                                const qubit::QubitState& psi0,
                                                std::span<const double> grid,
                                                std::size_t n_shots, std::uint64_t seed,
                                                const EnsembleOptions& options = {});

/// Convenience overload on the eliminated model of `ion`, starting in |up>.
std::vector<PairedDeviation> backflow_deviation(const open::IonParams& ion,
                                                std::span<const double> grid,
                                                std::size_t n_shots, std::uint64_t seed,
                                                const EnsembleOptions& options = {});

}  // namespace nhq::traj
