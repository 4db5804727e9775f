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

#include "nhq/numerics.hpp"

#include <iostream>

namespace nhq::numerics {

namespace {

double relative_scale(const ComplexMatrix& a) { return std::max(1.0, a.norm()); }

}  // namespace

bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= tol * relative_scale(a);
}

bool is_unitary(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const ComplexMatrix ident = ComplexMatrix::Identity(a.rows(), a.cols());
  return (a.adjoint() * a - ident).norm() <= tol * std::sqrt(static_cast<double>(a.rows()));
}

ComplexVector vectorize(const ComplexMatrix& rho) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("vectorize: matrix is not square");
  const Eigen::Index n = rho.rows();
  ComplexVector v(n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) v(j * n + i) = rho(i, j);
  }
  return v;
}

ComplexMatrix devectorize(const ComplexVector& v) {
  const auto len = v.size();
  auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(len))));
  if (n * n != len) {
    throw std::invalid_argument("devectorize: length " + std::to_string(len) +
                                " is not a perfect square");
  }
  ComplexMatrix rho(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) rho(i, j) = v(j * n + i);
  }
  return rho;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix SuperOperator::apply(const ComplexMatrix& rho) const {
  if (rho.rows() != dim || rho.cols() != dim) {
    throw std::invalid_argument("SuperOperator::apply: dimension mismatch");
  }
  return devectorize(matrix * vectorize(rho));
}

// vec(A X B) = (B^T kron A) vec(X) for column stacking.
SuperOperator lindbladian(const ComplexMatrix& hamiltonian,
                          std::span<const ComplexMatrix> jump_operators) {
  if (hamiltonian.rows() != hamiltonian.cols()) {
    throw std::invalid_argument("lindbladian: Hamiltonian is not square");
  }
  const Eigen::Index n = hamiltonian.rows();
  const ComplexMatrix ident = ComplexMatrix::Identity(n, n);
  ComplexMatrix gen = -kI * (kron(ident, hamiltonian) - kron(hamiltonian.transpose(), ident));
  for (const auto& jump : jump_operators) {
    if (jump.rows() != n || jump.cols() != n) {
      throw std::invalid_argument("lindbladian: jump operator dimension mismatch");
    }
    const ComplexMatrix ldl = jump.adjoint() * jump;
    gen += kron(jump.conjugate(), jump) - 0.5 * kron(ident, ldl) -
           0.5 * kron(ldl.transpose(), ident);
  }
  return SuperOperator{std::move(gen), n};
}

ComplexMatrix lindblad_rhs(const ComplexMatrix& hamiltonian,
                           std::span<const ComplexMatrix> jump_operators,
                           const ComplexMatrix& rho) {
  ComplexMatrix out = -kI * (hamiltonian * rho - rho * hamiltonian);
  for (const auto& jump : jump_operators) {
    const ComplexMatrix ldl = jump.adjoint() * jump;
    out += jump * rho * jump.adjoint() - 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

namespace {

Eigen::Vector2cd eigenvector_for(const Operator2& a, cd lambda) {
  // Rows of (A - lambda I) are orthogonal to the eigenvector; take the
  // better conditioned of the two candidate null vectors.
  Eigen::Vector2cd from_row0(a(0, 1), lambda - a(0, 0));
  Eigen::Vector2cd from_row1(lambda - a(1, 1), a(1, 0));
  Eigen::Vector2cd v = from_row0.norm() >= from_row1.norm() ? from_row0 : from_row1;
  return v.normalized();
}

}  // namespace

Eig2 eig2(const Operator2& a) {
  if (!all_finite(a)) throw std::invalid_argument("eig2: non-finite input");
  const cd half = 0.5 * a.trace();
  const cd det = a.determinant();
  const cd disc = std::sqrt(half * half - det);
  const cd plus = half + disc;
  const cd minus = half - disc;

  Eig2 out;
  // Avoid cancellation in the smaller root by going through det = l1 * l2.
  if (std::abs(plus) >= std::abs(minus)) {
    out.values = {plus, plus != cd{} ? det / plus : minus};
  } else {
    out.values = {det / minus, minus};
  }

  const double scale = a.norm();
  out.degenerate = std::abs(out.values[0] - out.values[1]) < kDegeneracyTolerance * scale ||
                   scale == 0.0;
  const bool off_diagonal_zero = std::abs(a(0, 1)) <= kDegeneracyTolerance * scale &&
                                 std::abs(a(1, 0)) <= kDegeneracyTolerance * scale;
  if (out.degenerate && off_diagonal_zero) {
    // Scalar matrix: every vector is an eigenvector.
    out.vectors = {Eigen::Vector2cd(1.0, 0.0), Eigen::Vector2cd(0.0, 1.0)};
  } else if (out.degenerate) {
    out.defective = true;
    out.vectors = {eigenvector_for(a, half)};
  } else {
    out.vectors = {eigenvector_for(a, out.values[0]), eigenvector_for(a, out.values[1])};
  }
  return out;
}

Operator2 pauli_x() {
  Operator2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Operator2 pauli_y() {
  Operator2 m;
  m << 0.0, -kI, kI, 0.0;
  return m;
}

Operator2 pauli_z() {
  Operator2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

ScalarOptimum golden_section_maximize(const std::function<double(double)>& f, double lo,
                                      double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::invalid_argument("bisect_root: interval does not bracket a root");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void warn(std::string_view message) { std::clog << "nhq: warning: " << message << '\n'; }

unsigned default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

}  // namespace nhq::numerics
