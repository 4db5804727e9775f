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

// Leggett-Garg correlations of a post-selected non-Hermitian qubit:
// two-time joint probabilities with Lueders updates, closed-form correlators
// for the |down>, sigma_z protocol, K3 maximization over time and over
// protocols, and the trajectory-level Monte Carlo estimate.

#include "nhq/nh_qubit.hpp"
#include "nhq/numerics.hpp"
#include "nhq/trajectories.hpp"

#include <array>
#include <cstdint>

namespace nhq::lg {

inline constexpr double kLuderBound = 1.5;
/// Branch weights below this are treated as exactly zero.
inline constexpr double kZeroBranch = 1e-15;

/// n . sigma for the unit vector with polar angle theta, azimuth phi.
Operator2 dichotomic_observable(double theta, double phi);

struct LGProtocol {
  qubit::QubitState psi0 = qubit::QubitState::down();
  Operator2 observable = numerics::pauli_z();

  /// Q must be Hermitian with Q^2 = 1 and tr Q = 0 (to 1e-12).
  void validate() const;
};

struct JointProbabilities {
  // p[ia][ib] with index 0 for outcome +1 and 1 for outcome -1.
  std::array<std::array<double, 2>, 2> p{};

  double at(int a, int b) const { return p[a == 1 ? 0 : 1][b == 1 ? 0 : 1]; }
  double total() const;
  /// sum_{ab} a b P(a, b)
  double correlator() const;
};

/// P(a at ti, b at tj): evolve psi0 to tj, project onto the b eigenspace,
/// evolve the projected state for ti - tj, project onto a. Every stretch of
/// evolution is renormalized. Requires ti >= tj >= 0.
JointProbabilities joint_probabilities(const LGProtocol& proto, const qubit::NHParams& p,
                                       double tj, double ti);

/// Two-time correlator for psi0 = |down>, Q = sigma_z, measurements at 0 and t.
/// Defined for negative t as well.
double correlator_C(const qubit::NHParams& p, double t);

/// Correlator between measurements at t and 2t for the same protocol.
double correlator_F(const qubit::NHParams& p, double t);

struct K3Result {
  double C21 = 0.0;
  double C32 = 0.0;
  double C31 = 0.0;
  double K3 = 0.0;
};

/// K3 = C(t) + F(t) - C(2t) from the closed forms.
K3Result k3(const qubit::NHParams& p, double t);

/// K3 at times (0, t, 2t) assembled from joint probabilities.
K3Result k3_joint(const LGProtocol& proto, const qubit::NHParams& p, double t);

struct K3Peak {
  double t_max = 0.0;
  double k3_max = 0.0;
  bool at_boundary = false;  // no interior maximum in the window
};

/// First local maximum of the closed-form K3 in [lo, hi], located to 1e-9.
K3Peak k3_max_over_t(const qubit::NHParams& p, double lo, double hi);

/// Window (0, pi / (2J)].
K3Peak k3_max_over_t(const qubit::NHParams& p);

struct K3Range {
  double t_min = 0.0;
  double k3_min = 0.0;
  double t_max = 0.0;
  double k3_max = 0.0;
};

/// Global extrema of the closed-form K3 on [lo, hi].
K3Range k3_range(const qubit::NHParams& p, double lo, double hi);

struct OptimizedK3 {
  double k3 = 0.0;
  double psi_theta = 0.0;
  double psi_phi = 0.0;
  double q_theta = 0.0;
  double q_phi = 0.0;
  double default_k3 = 0.0;  // psi0 = |down>, Q = sigma_z

  qubit::QubitState psi0() const { return qubit::QubitState::bloch(psi_theta, psi_phi); }
  Operator2 observable() const { return dichotomic_observable(q_theta, q_phi); }
};

/// K3 at times (0, t, 2t) for an arbitrary protocol, computed from Bloch
/// vectors. Matches k3_joint; used by the optimizer.
double k3_bloch(const qubit::NHParams& p, double t, double psi_theta, double psi_phi,
                double q_theta, double q_phi);

/// Max of K3 over initial Bloch angles and measurement axes: a
/// resolution^4 grid followed by pattern-search refinement. Ties go to the
/// lexicographically smallest (psi_theta, psi_phi, q_theta, q_phi).
OptimizedK3 k3_optimized(const qubit::NHParams& p, double t, int grid_resolution);

struct CorrelatorEstimate {
  double value = 0.0;
  double error = 0.0;
  std::size_t n_shots = 0;
  std::size_t n_first = 0;  // surviving the first stretch
  std::size_t n_both = 0;   // surviving both
};

struct K3Estimate {
  CorrelatorEstimate C21;
  CorrelatorEstimate C32;
  CorrelatorEstimate C31;
  double K3 = 0.0;
  double K3_error = 0.0;
};

/// Shot-level K3 at times (0, t, 2t). Each correlator uses its own n_shots
/// trajectories: evolve to t_j, measure Q, continue to t_i, measure Q,
/// rejecting shots with a detectable jump. C_ij = sum_b b p(b) E[a | b], with
/// p(b) from shots surviving the first stretch and E[a | b] from shots
/// surviving both; errors are propagated binomial errors.
K3Estimate k3_monte_carlo(const LGProtocol& proto, const traj::JumpModel& model, double t,
                          std::size_t n_shots, std::uint64_t seed,
                          const traj::EnsembleOptions& options = {});

}  // namespace nhq::lg
