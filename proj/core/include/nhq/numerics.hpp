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

// Dense complex linear algebra shared by the physics modules: matrix
// exponential, column-stacking vectorization, Lindblad superoperators,
// closed-form 2x2 eigensystems, and a few small numeric helpers.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <vector>

namespace nhq {

using cd = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Operator2 = Eigen::Matrix2cd;

inline constexpr cd kI{0.0, 1.0};

namespace numerics {

inline constexpr double kMatrixTolerance = 1e-12;

/// Relative gap below which a 2x2 spectrum is reported as degenerate.
inline constexpr double kDegeneracyTolerance = 1e-9;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const auto z = a(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  }
  return true;
}

namespace detail {

template <typename Derived>
double one_norm(const Eigen::MatrixBase<Derived>& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace detail

/// e^{A t} by scaling and squaring with a fixed (13,13) Pade approximant.
///
/// The scaling exponent is the smallest s with ||A t||_1 / 2^s <= theta_13,
/// which bounds the backward error of the approximant by the unit roundoff.
/// Works for fixed-size and dynamic Eigen matrices; throws
/// std::invalid_argument on non-finite input.
template <typename Derived>
typename Derived::PlainObject expm(const Eigen::MatrixBase<Derived>& a,
                                   double t = 1.0) {
  using Matrix = typename Derived::PlainObject;
  if (a.rows() != a.cols()) throw std::invalid_argument("expm: matrix is not square");
  if (!std::isfinite(t) || !all_finite(a)) {
    throw std::invalid_argument("expm: non-finite input");
  }
  constexpr double kTheta13 = 5.371920351148152;
  constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};

  Matrix x = a * t;
  const Eigen::Index n = x.rows();
  const double norm = detail::one_norm(x);
  int squarings = 0;
  if (norm > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
    x /= std::ldexp(1.0, squarings);
  }

  const Matrix ident = Matrix::Identity(n, n);
  const Matrix x2 = x * x;
  const Matrix x4 = x2 * x2;
  const Matrix x6 = x4 * x2;
  Matrix inner = b[13] * x6 + b[11] * x4 + b[9] * x2;
  Matrix u = x * (x6 * inner + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * ident);
  inner = b[12] * x6 + b[10] * x4 + b[8] * x2;
  Matrix v = x6 * inner + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * ident;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) r = (r * r).eval();
  return r;
}

bool is_hermitian(const ComplexMatrix& a, double tol = kMatrixTolerance);
bool is_unitary(const ComplexMatrix& a, double tol = kMatrixTolerance);

/// Column-stacking: element (i, j) of an n x n matrix lands at j*n + i.
ComplexVector vectorize(const ComplexMatrix& rho);
/// Inverse of vectorize; the length must be a perfect square.
ComplexMatrix devectorize(const ComplexVector& v);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// A linear map on column-stacked n x n matrices.
struct SuperOperator {
  ComplexMatrix matrix;  // n^2 x n^2
  Eigen::Index dim = 0;  // n

  ComplexMatrix apply(const ComplexMatrix& rho) const;
};

/// L[rho] = -i[H, rho] + sum_k (L_k rho L_k^+ - {L_k^+ L_k, rho}/2).
SuperOperator lindbladian(const ComplexMatrix& hamiltonian,
                          std::span<const ComplexMatrix> jump_operators);

/// The same generator evaluated directly on a matrix, without vectorizing.
ComplexMatrix lindblad_rhs(const ComplexMatrix& hamiltonian,
                           std::span<const ComplexMatrix> jump_operators,
                           const ComplexMatrix& rho);

struct Eig2 {
  std::array<cd, 2> values;
  // Two normalized eigenvectors, or one when the matrix is defective.
  std::vector<Eigen::Vector2cd> vectors;
  bool degenerate = false;
  bool defective = false;
};

/// Closed-form eigensystem of a 2x2 matrix from its trace and determinant.
Eig2 eig2(const Operator2& a);

Operator2 pauli_x();
Operator2 pauli_y();
Operator2 pauli_z();

struct ScalarOptimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
ScalarOptimum golden_section_maximize(const std::function<double(double)>& f,
                                      double lo, double hi, double tol);

/// Bisection for a sign change of f on [lo, hi]; requires f(lo)*f(hi) <= 0.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol);

void warn(std::string_view message);

unsigned default_workers();

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
/// executed exactly once; callers write results into per-index slots so the
/// outcome does not depend on scheduling. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned w = 0; w < n_threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace numerics
}  // namespace nhq
