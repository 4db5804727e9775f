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

// Open-system model of the ion: the 4-level Lindbladian on
// (|up>, |down>, |A>, |g>), the reduced 3-level Lindbladian on
// (|up>, |down>, |g>), adiabatic elimination of |A>, and no-jump
// conditional evolution.

#include "nhq/nh_qubit.hpp"
#include "nhq/numerics.hpp"

#include <span>
#include <vector>

namespace nhq::open {

using numerics::SuperOperator;

// Basis indices of the 4-level model.
inline constexpr Eigen::Index kUp = 0;
inline constexpr Eigen::Index kDown = 1;
inline constexpr Eigen::Index kAux = 2;
inline constexpr Eigen::Index kGround = 3;
// Ground-state index of the 3-level model (|up>, |down>, |g>).
inline constexpr Eigen::Index kGround3 = 2;

/// Lindblad rate of the reduced |down> -> |g> dissipator per unit of the
/// non-Hermitian gamma: i gamma sigma_z equals -2i gamma |down><down| up to a
/// trace shift, and -(i/2) L^+L must supply that, so L_eff = sqrt(4 gamma)|g><down|.
inline constexpr double kLossRatePerGamma = 4.0;

/// Decay branching of |A>.
struct Branching {
  double ground = 0.935;   // to |g>, detected
  double backflow = 0.0587;  // back into the qubit manifold, undetected
  double d3 = 0.0063;      // to the D3/2 level, detected
  double up_share = 0.5;   // fraction of the backflow landing in |up>

  void validate() const;
};

/// Rates of the 4-level model, all >= 0.
struct IonParams {
  double J = 1.0;        // |up> <-> |down> drive
  double J_A = 0.0;      // |down> <-> |A> drive
  double gamma_g = 1.0;  // |A> -> |g>
  double gamma_up = 0.0;   // |A> -> |up>
  double gamma_down = 0.0; // |A> -> |down>
  double gamma_d3 = 0.0;   // |A> -> D3/2, folded into a detectable loss to |g>

  void validate() const;
  /// Total decay rate of |A>.
  double total_width() const noexcept { return gamma_g + gamma_up + gamma_down + gamma_d3; }
  /// J_A^2 / total_width, the loss gamma of the eliminated qubit.
  double effective_gamma() const;
  qubit::NHParams effective_params() const { return {J, effective_gamma()}; }
  bool has_backflow() const noexcept { return gamma_up > 0.0 || gamma_down > 0.0; }
};

/// Splits a total |A> width according to `branching`.
IonParams ion_from_branching(double J, double J_A, double total_width,
                             const Branching& branching = {});

/// Ion whose eliminated qubit has loss `gamma`, with total_width / J_A =
/// `width_ratio` (large ratios approach the adiabatic limit).
IonParams ion_for_gamma(double J, double gamma, double width_ratio,
                        const Branching& branching = {});

/// Same ion with every backflow channel redirected to |g>; the total width
/// and hence the effective gamma are unchanged.
IonParams without_backflow(const IonParams& p);

/// gamma = J_A^2 / gamma_g.
double effective_gamma(double J_A, double gamma_g);

/// Positive-semidefinite Hermitian unit-trace matrix, dimension 2, 3, or 4.
class DensityMatrix {
 public:
  /// Validates shape, Hermiticity, and trace (1e-10).
  explicit DensityMatrix(ComplexMatrix rho);

  /// |psi><psi| with psi placed on the first two levels of a dim-level space.
  static DensityMatrix from_qubit(const qubit::QubitState& psi, Eigen::Index dim);

  const ComplexMatrix& matrix() const noexcept { return rho_; }
  Eigen::Index dim() const noexcept { return rho_.rows(); }
  double trace() const { return rho_.trace().real(); }
  double population(Eigen::Index level) const { return rho_(level, level).real(); }
  double min_eigenvalue() const;
  /// rho_dd / (rho_uu + rho_dd): readout conditioned on the qubit manifold.
  double qubit_p_down() const;
  double qubit_weight() const { return population(0) + population(1); }

 private:
  struct Unchecked {};
  DensityMatrix(ComplexMatrix rho, Unchecked) : rho_(std::move(rho)) {}
  friend DensityMatrix evolve_density(const SuperOperator&, const DensityMatrix&, double);

  ComplexMatrix rho_;
};

ComplexMatrix hamiltonian_4(const IonParams& p);
std::vector<ComplexMatrix> jump_operators_4(const IonParams& p);
SuperOperator build_lindbladian_4(const IonParams& p);

/// 9x9 Lindbladian with drive J and the single dissipator
/// sqrt(rate_factor * gamma)|g><down|.
SuperOperator build_lindbladian_3(double J, double gamma,
                                  double rate_factor = kLossRatePerGamma);

/// rho(t) = devec(expm(L t) vec(rho0)); the Hermitian part is restored and a
/// warning is logged if the anti-Hermitian residue exceeds 1e-8.
DensityMatrix evolve_density(const SuperOperator& generator, const DensityMatrix& rho0,
                             double t);

std::vector<DensityMatrix> evolve_density(const SuperOperator& generator,
                                          const DensityMatrix& rho0,
                                          std::span<const double> times);

struct NoJumpResult {
  qubit::QubitState state;
  double survival;  // probability of no jump at all up to t
};

/// No-jump branch of the reduced model: H_eff = J sigma_x - 2i gamma |down><down|.
NoJumpResult no_jump_conditional(const qubit::NHParams& p, const qubit::QubitState& psi0,
                                 double t);

/// No-jump branch of the 4-level model; the state is the qubit part of the
/// conditional state, renormalized.
NoJumpResult no_jump_conditional(const IonParams& p, const qubit::QubitState& psi0, double t);

struct ModelDeviation {
  double max_four_vs_two = 0.0;
  double mean_four_vs_two = 0.0;
  double max_three_vs_two = 0.0;
  double mean_three_vs_two = 0.0;
  double max_four_vs_three = 0.0;
  double mean_four_vs_three = 0.0;

  double max() const;
};

/// Post-selected p_down(t) from the 4-level Lindbladian, the 3-level
/// Lindbladian, and the non-Hermitian qubit, compared on `grid`.
/// Requires a total width >= 10 J_A.
ModelDeviation compare_models(const IonParams& p, const qubit::QubitState& psi0,
                              std::span<const double> grid);

struct RateCalibration {
  double assumed = 1.0;  // rate factor of L_eff = sqrt(gamma)|g><down|
  double fitted = 0.0;
  double deviation_assumed = 0.0;
  double deviation_fitted = 0.0;
};

/// Fits the 3-level dissipator rate factor that makes its no-jump p_down(t)
/// match the non-Hermitian qubit on `grid`.
RateCalibration calibrate_loss_rate(const qubit::NHParams& p, const qubit::QubitState& psi0,
                                    std::span<const double> grid);

/// Max |p_down^{(3)} - p_down^{(2)}| over grid for a given rate factor.
double three_level_deviation(const qubit::NHParams& p, const qubit::QubitState& psi0,
                             std::span<const double> grid, double rate_factor);

}  // namespace nhq::open
