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

#include "nhq/nh_qubit.hpp"

#include "nhq/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nhq::qubit {

NHParams::NHParams(double J, double gamma) : J_(J), gamma_(gamma) {
  if (!std::isfinite(J) || !(J > 0.0)) {
    throw std::invalid_argument("NHParams: J must be finite and > 0, got " + std::to_string(J));
  }
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw std::invalid_argument("NHParams: gamma must be finite and >= 0, got " +
                                std::to_string(gamma));
  }
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::kPTSymmetric:
      return "symmetric";
    case Phase::kExceptionalPoint:
      return "exceptional";
    case Phase::kPTBroken:
      return "broken";
  }
  return "unknown";
}

SpectralData spectrum(const NHParams& p) {
  const double d2 = p.delta_squared();
  const double abs_delta = std::sqrt(std::abs(d2));
  SpectralData out;
  out.delta = d2 >= 0.0 ? cd{abs_delta, 0.0} : cd{0.0, abs_delta};
  if (abs_delta < kExceptionalPointTolerance * p.J()) {
    out.phase = Phase::kExceptionalPoint;
  } else {
    out.phase = d2 > 0.0 ? Phase::kPTSymmetric : Phase::kPTBroken;
  }
  out.period = abs_delta > 0.0 ? 2.0 * std::numbers::pi / abs_delta
                               : std::numeric_limits<double>::infinity();
  return out;
}

QubitState::QubitState() : amplitudes_(0.0, 1.0) {}

QubitState QubitState::from_amplitudes(const Eigen::Vector2cd& amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("QubitState: amplitudes must be finite and non-zero");
  }
  return QubitState(amplitudes / n);
}

QubitState QubitState::up() { return QubitState(Eigen::Vector2cd(1.0, 0.0)); }
QubitState QubitState::down() { return QubitState(Eigen::Vector2cd(0.0, 1.0)); }

QubitState QubitState::plus() {
  return QubitState(Eigen::Vector2cd(std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2));
}

QubitState QubitState::minus() {
  return QubitState(Eigen::Vector2cd(std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2));
}

QubitState QubitState::bloch(double theta, double phi) {
  return QubitState(Eigen::Vector2cd(std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)));
}

Eigen::Vector3d QubitState::bloch_vector() const {
  const cd coherence = std::conj(amplitudes_(0)) * amplitudes_(1);
  return {2.0 * coherence.real(), 2.0 * coherence.imag(), prob_up() - prob_down()};
}

double QubitState::fidelity(const QubitState& other) const {
  return std::norm(amplitudes_.dot(other.amplitudes_));
}

Operator2 hamiltonian(const NHParams& p) {
  Operator2 h;
  h << kI * p.gamma(), p.J(), p.J(), -kI * p.gamma();
  return h;
}

PropagatorCoefficients propagator_coefficients(const NHParams& p, double t) {
  const double d2 = p.delta_squared();
  const double abs_delta = std::sqrt(std::abs(d2));
  const double growth = abs_delta * std::abs(t);
  if (growth > kMaxGrowthExponent) {
    throw std::overflow_error("propagator: |Delta| t = " + std::to_string(growth) +
                              " exceeds the overflow guard");
  }
  if (growth < kSeriesThreshold) {
    const double x2 = d2 * t * t;
    return {1.0 - 0.5 * x2, t * (1.0 - x2 / 6.0)};
  }
  if (d2 > 0.0) {
    return {std::cos(abs_delta * t), std::sin(abs_delta * t) / abs_delta};
  }
  return {std::cosh(abs_delta * t), std::sinh(abs_delta * t) / abs_delta};
}

Operator2 propagator(const NHParams& p, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("propagator: t must be >= 0");
  const auto [c, s] = propagator_coefficients(p, t);
  Operator2 g;
  g << c + s * p.gamma(), -kI * (s * p.J()), -kI * (s * p.J()), c - s * p.gamma();
  return g;
}

QubitState evolve(const NHParams& p, const QubitState& psi0, double t) {
  const Eigen::Vector2cd v = propagator(p, t) * psi0.amplitudes();
  const double n = v.stableNorm();
  if (!(n >= kUnderflowNorm)) {
    throw PostSelectionUnderflow("evolve: post-selected norm " + std::to_string(n) +
                                 " underflows");
  }
  return QubitState::from_amplitudes(v / n);
}

PopulationTransfers population_transfers(const NHParams& p, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("population_transfers: t must be >= 0");
  const double s = propagator_coefficients(p, t).sinc_term;
  const double s2 = s * s;
  return {p.J() * p.J() * s2, p.gamma() * p.gamma() * s2, p.delta_squared() * s2};
}

TransferPair reconstruct_transfers(const NHParams& p, double t, double fraction_up,
                                   double p_down, double fraction_plus, double p_minus) {
  for (double x : {fraction_up, p_down, fraction_plus, p_minus}) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw std::invalid_argument("reconstruct_transfers: inputs must lie in [0, 1]");
    }
  }
  const double gain = std::exp(2.0 * p.gamma() * t);
  return {gain * fraction_up * p_down, gain * fraction_plus * p_minus};
}

DeltaFit fit_delta(std::span<const DeltaPSample> samples) {
  if (samples.size() < 4) {
    throw FitError("fit_delta: need at least 4 samples, got " + std::to_string(samples.size()));
  }
  double num = 0.0;
  double den = 0.0;
  for (const auto& s : samples) {
    if (!std::isfinite(s.t) || !std::isfinite(s.delta_p)) {
      throw FitError("fit_delta: non-finite sample");
    }
    const double t2 = s.t * s.t;
    num += s.delta_p * t2;
    den += t2 * t2;
  }
  if (!(den > 0.0)) throw FitError("fit_delta: degenerate design (all t = 0)");
  const double coefficient = num / den;
  return {std::sqrt(std::abs(coefficient)), coefficient >= 0.0 ? 1 : -1, coefficient};
}

std::vector<DeltaPSample> delta_p_samples(const NHParams& p, std::span<const double> times) {
  std::vector<DeltaPSample> out;
  out.reserve(times.size());
  for (double t : times) out.push_back({t, population_transfers(p, t).delta_p});
  return out;
}

Phase probe_phase(const NHParams& p, double probe_jt) {
  const double dp = population_transfers(p, probe_jt / p.J()).delta_p;
  if (dp > 0.0) return Phase::kPTSymmetric;
  if (dp < 0.0) return Phase::kPTBroken;
  return Phase::kExceptionalPoint;
}

}  // namespace nhq::qubit
