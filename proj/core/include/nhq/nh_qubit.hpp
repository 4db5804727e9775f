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

// The PT-symmetric qubit H = J sigma_x + i gamma sigma_z, its propagator
// G(t) = cos(Delta t) 1 - i H sin(Delta t) / Delta in all three spectral
// regimes, renormalized (post-selected) evolution, and the population
// transfer difference used to tell the phases apart.

#include "nhq/numerics.hpp"

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace nhq::qubit {

/// Below this value of |Delta| t the propagator switches to its series form.
inline constexpr double kSeriesThreshold = 1e-6;
/// |Delta| / J below which the spectrum is classified as the exceptional point.
inline constexpr double kExceptionalPointTolerance = 1e-6;
/// Largest admissible |Delta| t; beyond it e^{|Delta| t} overflows the
/// post-selection weights.
inline constexpr double kMaxGrowthExponent = 700.0;
/// Norm below which a post-selected state cannot be renormalized.
inline constexpr double kUnderflowNorm = 1e-150;
/// Default short-time probe (in units of 1/J) for phase classification.
inline constexpr double kDefaultProbeJt = 0.1;

class NHParams {
 public:
  /// Requires J > 0 and gamma >= 0, both finite.
  NHParams(double J, double gamma);

  double J() const noexcept { return J_; }
  double gamma() const noexcept { return gamma_; }
  double gamma_over_J() const noexcept { return gamma_ / J_; }
  /// Delta^2 = J^2 - gamma^2, evaluated without cancellation near the EP.
  double delta_squared() const noexcept { return (J_ - gamma_) * (J_ + gamma_); }

 private:
  double J_;
  double gamma_;
};

enum class Phase { kPTSymmetric, kExceptionalPoint, kPTBroken };

std::string_view to_string(Phase phase);

struct SpectralData {
  cd delta;      // principal branch: real >= 0, or positive imaginary
  Phase phase;
  double period; // 2 pi / |Delta|, infinite at the EP
};

SpectralData spectrum(const NHParams& p);

/// Normalized qubit state in the (|up>, |down>) basis.
class QubitState {
 public:
  QubitState();  // |down>

  /// Normalizes `amplitudes`; throws std::invalid_argument for a zero vector.
  static QubitState from_amplitudes(const Eigen::Vector2cd& amplitudes);
  static QubitState up();
  static QubitState down();
  static QubitState plus();
  static QubitState minus();
  /// cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>.
  static QubitState bloch(double theta, double phi);

  const Eigen::Vector2cd& amplitudes() const noexcept { return amplitudes_; }
  double prob_up() const noexcept { return std::norm(amplitudes_(0)); }
  double prob_down() const noexcept { return std::norm(amplitudes_(1)); }
  Eigen::Vector3d bloch_vector() const;
  double fidelity(const QubitState& other) const;

 private:
  explicit QubitState(const Eigen::Vector2cd& normalized) : amplitudes_(normalized) {}
  Eigen::Vector2cd amplitudes_;
};

Operator2 hamiltonian(const NHParams& p);

/// G(t) = cos_term * 1 - i * sinc_term * H. Both coefficients are real in
/// every phase: trigonometric below the EP, hyperbolic above, polynomial at it.
struct PropagatorCoefficients {
  double cos_term;
  double sinc_term;
};

/// Valid for either sign of t. Throws std::overflow_error when |Delta| t
/// exceeds kMaxGrowthExponent.
PropagatorCoefficients propagator_coefficients(const NHParams& p, double t);

/// G(t) for t >= 0.
Operator2 propagator(const NHParams& p, double t);

/// G(t) psi0 / ||G(t) psi0||. Throws PostSelectionUnderflow when the norm
/// drops below kUnderflowNorm.
QubitState evolve(const NHParams& p, const QubitState& psi0, double t);

struct PopulationTransfers {
  double p_gamma;  // |<down|G|up>|^2
  double p_j;      // |<-|G|+>|^2
  double delta_p;  // p_gamma - p_j = sin^2(Delta t)
};

PopulationTransfers population_transfers(const NHParams& p, double t);

struct TransferPair {
  double p_gamma;
  double p_j;
};

/// Population transfers from the four measured quantities: post-selection
/// fractions F_up, F_+ and conditional probabilities p_down, p_minus.
TransferPair reconstruct_transfers(const NHParams& p, double t, double fraction_up,
                                   double p_down, double fraction_plus, double p_minus);

struct DeltaPSample {
  double t;
  double delta_p;
};

struct DeltaFit {
  double abs_delta;
  int sign;            // +1 symmetric, -1 broken
  double coefficient;  // fitted s * Delta^2
};

/// Least-squares fit of delta_p ~ coefficient * t^2 (no constant or linear
/// term). Needs at least four samples at short times.
DeltaFit fit_delta(std::span<const DeltaPSample> samples);

/// Analytic delta_p at the given times.
std::vector<DeltaPSample> delta_p_samples(const NHParams& p, std::span<const double> times);

/// Phase read off the sign of delta_p at t = probe_jt / J.
Phase probe_phase(const NHParams& p, double probe_jt = kDefaultProbeJt);

}  // namespace nhq::qubit
