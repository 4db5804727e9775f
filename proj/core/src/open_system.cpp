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

#include "nhq/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nhq::open {

namespace {

void require_rate(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument(std::string("IonParams: ") + name +
                                " must be finite and >= 0");
  }
}

ComplexMatrix ket_bra(Eigen::Index n, Eigen::Index row, Eigen::Index col, double amplitude) {
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(row, col) = amplitude;
  return m;
}

double p_down_nh(const qubit::NHParams& p, const qubit::QubitState& psi0, double t) {
  return qubit::evolve(p, psi0, t).prob_down();
}

}  // namespace

void Branching::validate() const {
  for (double x : {ground, backflow, d3, up_share}) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
      throw std::invalid_argument("Branching: fractions must lie in [0, 1]");
    }
  }
  if (std::abs(ground + backflow + d3 - 1.0) > 1e-9) {
    throw std::invalid_argument("Branching: ground + backflow + d3 must equal 1");
  }
}

void IonParams::validate() const {
  if (!std::isfinite(J) || !(J > 0.0)) throw std::invalid_argument("IonParams: J must be > 0");
  require_rate(J_A, "J_A");
  require_rate(gamma_g, "gamma_g");
  require_rate(gamma_up, "gamma_up");
  require_rate(gamma_down, "gamma_down");
  require_rate(gamma_d3, "gamma_d3");
}

double IonParams::effective_gamma() const {
  if (J_A == 0.0) return 0.0;
  return open::effective_gamma(J_A, total_width());
}

IonParams ion_from_branching(double J, double J_A, double total_width,
                             const Branching& branching) {
  branching.validate();
  IonParams p;
  p.J = J;
  p.J_A = J_A;
  p.gamma_g = branching.ground * total_width;
  p.gamma_up = branching.backflow * branching.up_share * total_width;
  p.gamma_down = branching.backflow * (1.0 - branching.up_share) * total_width;
  p.gamma_d3 = branching.d3 * total_width;
  p.validate();
  return p;
}

IonParams ion_for_gamma(double J, double gamma, double width_ratio, const Branching& branching) {
  if (!(width_ratio > 0.0)) throw std::invalid_argument("ion_for_gamma: width_ratio must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("ion_for_gamma: gamma must be >= 0");
  if (gamma == 0.0) return ion_from_branching(J, 0.0, width_ratio * J, branching);
  // gamma = J_A^2 / width and width = ratio * J_A.
  const double J_A = gamma * width_ratio;
  return ion_from_branching(J, J_A, J_A * width_ratio, branching);
}

IonParams without_backflow(const IonParams& p) {
  IonParams q = p;
  q.gamma_g += p.gamma_up + p.gamma_down;
  q.gamma_up = 0.0;
  q.gamma_down = 0.0;
  return q;
}

double effective_gamma(double J_A, double gamma_g) {
  if (!(gamma_g > 0.0) || !std::isfinite(gamma_g)) {
    throw std::invalid_argument("effective_gamma: gamma_g must be > 0");
  }
  return J_A * J_A / gamma_g;
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
  const auto n = rho_.rows();
  if (rho_.cols() != n || n < 2 || n > 4) {
    throw std::invalid_argument("DensityMatrix: expected a square 2x2, 3x3, or 4x4 matrix");
  }
  if (!numerics::is_hermitian(rho_, 1e-10)) {
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
  }
  if (std::abs(rho_.trace() - 1.0) > 1e-10) {
    throw std::invalid_argument("DensityMatrix: trace must be 1");
  }
}

DensityMatrix DensityMatrix::from_qubit(const qubit::QubitState& psi, Eigen::Index dim) {
  ComplexVector v = ComplexVector::Zero(dim);
  v.head<2>() = psi.amplitudes();
  return DensityMatrix(v * v.adjoint());
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double DensityMatrix::qubit_p_down() const {
  const double w = qubit_weight();
  if (!(w > 0.0)) throw PostSelectionUnderflow("qubit_p_down: empty qubit manifold");
  return population(1) / w;
}

ComplexMatrix hamiltonian_4(const IonParams& p) {
  ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  h(kUp, kDown) = h(kDown, kUp) = p.J;
  h(kDown, kAux) = h(kAux, kDown) = p.J_A;
  return h;
}

std::vector<ComplexMatrix> jump_operators_4(const IonParams& p) {
  return {
      ket_bra(4, kGround, kAux, std::sqrt(p.gamma_g)),
      ket_bra(4, kUp, kAux, std::sqrt(p.gamma_up)),
      ket_bra(4, kDown, kAux, std::sqrt(p.gamma_down)),
      ket_bra(4, kGround, kAux, std::sqrt(p.gamma_d3)),
  };
}

SuperOperator build_lindbladian_4(const IonParams& p) {
  p.validate();
  const auto jumps = jump_operators_4(p);
  return numerics::lindbladian(hamiltonian_4(p), jumps);
}

SuperOperator build_lindbladian_3(double J, double gamma, double rate_factor) {
  if (!(J >= 0.0) || !(gamma >= 0.0) || !(rate_factor >= 0.0)) {
    throw std::invalid_argument("build_lindbladian_3: rates must be >= 0");
  }
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(kUp, kDown) = h(kDown, kUp) = J;
  const std::vector<ComplexMatrix> jumps = {
      ket_bra(3, kGround3, kDown, std::sqrt(rate_factor * gamma))};
  return numerics::lindbladian(h, jumps);
}

DensityMatrix evolve_density(const SuperOperator& generator, const DensityMatrix& rho0,
                             double t) {
  if (rho0.dim() != generator.dim) {
    throw std::invalid_argument("evolve_density: dimension mismatch between generator (" +
                                std::to_string(generator.dim) + ") and state (" +
                                std::to_string(rho0.dim()) + ")");
  }
  const ComplexVector v = numerics::expm(generator.matrix, t) * numerics::vectorize(rho0.matrix());
  ComplexMatrix rho = numerics::devectorize(v);
  const double residue = (rho - rho.adjoint()).norm();
  if (residue > 1e-8) {
    numerics::warn("evolve_density: anti-Hermitian residue " + std::to_string(residue));
  }
  ComplexMatrix hermitian = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(std::move(hermitian), DensityMatrix::Unchecked{});
}

std::vector<DensityMatrix> evolve_density(const SuperOperator& generator,
                                          const DensityMatrix& rho0,
                                          std::span<const double> times) {
  std::vector<DensityMatrix> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(evolve_density(generator, rho0, t));
  return out;
}

NoJumpResult no_jump_conditional(const qubit::NHParams& p, const qubit::QubitState& psi0,
                                 double t) {
  Operator2 h_eff;
  h_eff << 0.0, p.J(), p.J(), -0.5 * kI * (kLossRatePerGamma * p.gamma());
  const Eigen::Vector2cd v = numerics::expm(Operator2(-kI * h_eff), t) * psi0.amplitudes();
  const double survival = v.squaredNorm();
  if (!(std::sqrt(survival) >= qubit::kUnderflowNorm)) {
    throw PostSelectionUnderflow("no_jump_conditional: survival underflows");
  }
  return {qubit::QubitState::from_amplitudes(v), survival};
}

NoJumpResult no_jump_conditional(const IonParams& p, const qubit::QubitState& psi0, double t) {
  p.validate();
  // |g> is unreachable without a jump, so the (up, down, A) block suffices.
  Eigen::Matrix3cd h_eff = Eigen::Matrix3cd::Zero();
  h_eff(kUp, kDown) = h_eff(kDown, kUp) = p.J;
  h_eff(kDown, kAux) = h_eff(kAux, kDown) = p.J_A;
  h_eff(kAux, kAux) = -0.5 * kI * p.total_width();
  Eigen::Vector3cd psi = Eigen::Vector3cd::Zero();
  psi.head<2>() = psi0.amplitudes();
  const Eigen::Vector3cd v = numerics::expm(Eigen::Matrix3cd(-kI * h_eff), t) * psi;
  const double survival = v.squaredNorm();
  const Eigen::Vector2cd qubit_part = v.head<2>();
  if (!(qubit_part.norm() >= qubit::kUnderflowNorm)) {
    throw PostSelectionUnderflow("no_jump_conditional: survival underflows");
  }
  return {qubit::QubitState::from_amplitudes(qubit_part), survival};
}

double ModelDeviation::max() const {
  return std::max({max_four_vs_two, max_three_vs_two, max_four_vs_three});
}

ModelDeviation compare_models(const IonParams& p, const qubit::QubitState& psi0,
                              std::span<const double> grid) {
  p.validate();
  if (p.total_width() < 10.0 * p.J_A) {
    throw std::invalid_argument("compare_models: requires a total width >= 10 J_A");
  }
  if (grid.empty()) throw std::invalid_argument("compare_models: empty grid");
  const qubit::NHParams nh = p.effective_params();
  const SuperOperator l4 = build_lindbladian_4(p);
  const SuperOperator l3 = build_lindbladian_3(p.J, nh.gamma());
  const DensityMatrix rho4 = DensityMatrix::from_qubit(psi0, 4);
  const DensityMatrix rho3 = DensityMatrix::from_qubit(psi0, 3);

  ModelDeviation out;
  for (double t : grid) {
    const double p4 = evolve_density(l4, rho4, t).qubit_p_down();
    const double p3 = evolve_density(l3, rho3, t).qubit_p_down();
    const double p2 = p_down_nh(nh, psi0, t);
    const double d42 = std::abs(p4 - p2);
    const double d32 = std::abs(p3 - p2);
    const double d43 = std::abs(p4 - p3);
    out.max_four_vs_two = std::max(out.max_four_vs_two, d42);
    out.max_three_vs_two = std::max(out.max_three_vs_two, d32);
    out.max_four_vs_three = std::max(out.max_four_vs_three, d43);
    out.mean_four_vs_two += d42;
    out.mean_three_vs_two += d32;
    out.mean_four_vs_three += d43;
  }
  const auto n = static_cast<double>(grid.size());
  out.mean_four_vs_two /= n;
  out.mean_three_vs_two /= n;
  out.mean_four_vs_three /= n;
  return out;
}

double three_level_deviation(const qubit::NHParams& p, const qubit::QubitState& psi0,
                             std::span<const double> grid, double rate_factor) {
  const SuperOperator l3 = build_lindbladian_3(p.J(), p.gamma(), rate_factor);
  const DensityMatrix rho0 = DensityMatrix::from_qubit(psi0, 3);
  double worst = 0.0;
  for (double t : grid) {
    const double p3 = evolve_density(l3, rho0, t).qubit_p_down();
    worst = std::max(worst, std::abs(p3 - p_down_nh(p, psi0, t)));
  }
  return worst;
}

RateCalibration calibrate_loss_rate(const qubit::NHParams& p, const qubit::QubitState& psi0,
                                    std::span<const double> grid) {
  if (!(p.gamma() > 0.0)) {
    throw std::invalid_argument("calibrate_loss_rate: gamma must be > 0");
  }
  // Search log2(rate factor) in [-2, 5], i.e. factors 0.25 .. 32.
  const auto objective = [&](double log_factor) {
    return -three_level_deviation(p, psi0, grid, std::exp2(log_factor));
  };
  const auto best = numerics::golden_section_maximize(objective, -2.0, 5.0, 1e-9);
  RateCalibration out;
  out.fitted = std::exp2(best.x);
  out.deviation_fitted = -best.value;
  out.deviation_assumed = three_level_deviation(p, psi0, grid, out.assumed);
  return out;
}

}  // namespace nhq::open
