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

// Reference implementations used as independent oracles in the tests.

#include "nhq/numerics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <random>

namespace nhq::testing {

using ld = long double;
using ComplexLd = std::complex<ld>;
using MatrixLd = Eigen::Matrix<ComplexLd, Eigen::Dynamic, Eigen::Dynamic>;

/// exp(A) by a long-double Taylor series with plain scaling and squaring.
inline ComplexMatrix taylor_expm(const ComplexMatrix& a) {
  MatrixLd x = a.cast<ComplexLd>();
  ld norm = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    ld col = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) col += std::abs(x(i, j));
    norm = std::max(norm, col);
  }
  int s = 0;
  while (norm > 0.25L) {
    norm /= 2;
    ++s;
  }
  x /= std::ldexp(1.0L, s);
  const Eigen::Index n = x.rows();
  MatrixLd term = MatrixLd::Identity(n, n);
  MatrixLd sum = term;
  for (int k = 1; k < 40; ++k) {
    term = (term * x / static_cast<ld>(k)).eval();
    sum += term;
  }
  for (int k = 0; k < s; ++k) sum = (sum * sum).eval();
  return sum.cast<cd>();
}

/// Classical RK4 for dy/dt = f(y) with n fixed steps.
template <typename Y>
Y rk4(const std::function<Y(const Y&)>& f, Y y, double t, int steps) {
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Y k1 = f(y);
    const Y k2 = f(y + 0.5 * h * k1);
    const Y k3 = f(y + 0.5 * h * k2);
    const Y k4 = f(y + h * k3);
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

inline ComplexMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cd(g(rng), g(rng));
  }
  return m;
}

inline double max_abs(const ComplexMatrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace nhq::testing
