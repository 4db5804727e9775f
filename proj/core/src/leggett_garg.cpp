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


#include "nhq/leggett_garg.hpp"

#include "nhq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace nhq::lg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kScanSamples = 4001;

Eigen::Vector3d axis(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Eigen::Vector3d bloch_of(const Eigen::Vector2cd& raw) {
  const double scale = raw.cwiseAbs().maxCoeff();
  if (!(scale >= qubit::kUnderflowNorm)) {
    throw PostSelectionUnderflow("k3: post-selected norm underflows");
  }
  const Eigen::Vector2cd v = raw / scale;
  const double n2 = v.squaredNorm();
  const cd coherence = std::conj(v(0)) * v(1);
  return Eigen::Vector3d(2.0 * coherence.real(), 2.0 * coherence.imag(),
                         std::norm(v(0)) - std::norm(v(1))) /
         n2;
}

// Eigenvectors of n . sigma for outcomes +1 and -1.
std::array<Eigen::Vector2cd, 2> axis_eigenvectors(double theta, double phi) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  const cd e = std::polar(1.0, phi);
  return {Eigen::Vector2cd(c, e * s), Eigen::Vector2cd(s, -e * c)};
}

// E_b(tau) for b = +1, -1 after evolution with g.
std::array<double, 2> conditional_means(const Operator2& g, const Eigen::Vector3d& n,
                                        const std::array<Eigen::Vector2cd, 2>& eig) {
  return {n.dot(bloch_of(g * eig[0])), n.dot(bloch_of(g * eig[1]))};
}

struct AxisTerms {
  double a1, b1, a2, b2;
};

AxisTerms axis_terms(const Operator2& g1, const Operator2& g2, double q_theta, double q_phi) {
  const Eigen::Vector3d n = axis(q_theta, q_phi);
  const auto eig = axis_eigenvectors(q_theta, q_phi);
  const auto e1 = conditional_means(g1, n, eig);
  const auto e2 = conditional_means(g2, n, eig);
  return {0.5 * (e1[0] - e1[1]), 0.5 * (e1[0] + e1[1]), 0.5 * (e2[0] - e2[1]),
          0.5 * (e2[0] + e2[1])};
}

double combine(const AxisTerms& a, double q0, double qt) {
  return (2.0 * a.a1 - a.a2) + q0 * (a.b1 - a.b2) + qt * a.b1;
}

double wrap(double x, double period) {
  x = std::fmod(x, period);
  return x < 0.0 ? x + period : x;
}

// Maps (theta, phi) onto theta in [0, pi], phi in [0, 2 pi) with the same direction.
void canonicalize(double& theta, double& phi) {
  theta = wrap(theta, 2.0 * kPi);
  if (theta > kPi) {
    theta = 2.0 * kPi - theta;
    phi += kPi;
  }
  phi = wrap(phi, 2.0 * kPi);
}

unsigned resolve_workers(const traj::EnsembleOptions& options) {
  return options.workers == 0 ? numerics::default_workers() : options.workers;
}

double resolve_dt(const traj::JumpModel& model, const traj::EnsembleOptions& options) {
  return options.dt > 0.0 ? options.dt : model.default_dt();
}

std::vector<double> scan(const std::function<double(double)>& f, double lo, double hi,
                         std::vector<double>& ts) {
  ts.resize(kScanSamples);
  std::vector<double> ks(kScanSamples);
  for (int i = 0; i < kScanSamples; ++i) {
    ts[i] = lo + (hi - lo) * i / (kScanSamples - 1);
    ks[i] = f(ts[i]);
  }
  return ks;
}

void check_window(double lo, double hi) {
  if (!(lo >= 0.0 && hi > lo && std::isfinite(hi))) {
    throw std::invalid_argument("k3: window must satisfy 0 <= lo < hi");
  }
}

// a / (a + b) with a = (c - gamma s)^2 and b = J^2 s^2: the post-selected
// probability of |down> after evolving |down> for t, evaluated as a ratio so
// that it stays finite where c and s are large.
double down_weight(const qubit::NHParams& p, double t) {
  const auto [c, s] = qubit::propagator_coefficients(p, t);
  if (s == 0.0) return 1.0;
  const double x = c / s - p.gamma();
  const double r = x * x;
  return r / (r + p.J() * p.J());
}

}  // namespace

Operator2 dichotomic_observable(double theta, double phi) {
  const Eigen::Vector3d n = axis(theta, phi);
  return n(0) * numerics::pauli_x() + n(1) * numerics::pauli_y() + n(2) * numerics::pauli_z();
}

void LGProtocol::validate() const {
  constexpr double tol = numerics::kMatrixTolerance;
  const Operator2& q = observable;
  if (!numerics::is_hermitian(q, tol)) {
    throw std::invalid_argument("LGProtocol: observable is not Hermitian");
  }
  if ((q * q - Operator2::Identity()).norm() > tol) {
    throw std::invalid_argument("LGProtocol: observable does not square to identity");
  }
  if (std::abs(q.trace()) > tol) {
    throw std::invalid_argument("LGProtocol: observable is not traceless");
  }
}

double JointProbabilities::total() const { return p[0][0] + p[0][1] + p[1][0] + p[1][1]; }

double JointProbabilities::correlator() const {
  return p[0][0] - p[0][1] - p[1][0] + p[1][1];
}

JointProbabilities joint_probabilities(const LGProtocol& proto, const qubit::NHParams& p,
                                       double tj, double ti) {
  proto.validate();
  if (!(tj >= 0.0 && ti >= tj)) {
    throw std::invalid_argument("joint_probabilities: need ti >= tj >= 0");
  }
  const Operator2 ident = Operator2::Identity();
  const std::array<Operator2, 2> proj = {0.5 * (ident + proto.observable),
                                         0.5 * (ident - proto.observable)};
  const Eigen::Vector2cd at_j = qubit::evolve(p, proto.psi0, tj).amplitudes();
  const Operator2 g = qubit::propagator(p, ti - tj);
  JointProbabilities out;
  for (int ib = 0; ib < 2; ++ib) {
    const Eigen::Vector2cd branch = proj[ib] * at_j;
    const double wb = branch.squaredNorm();
    if (wb < kZeroBranch) continue;
    const Eigen::Vector2cd grown = g * (branch / std::sqrt(wb));
    const double scale = grown.cwiseAbs().maxCoeff();
    if (!(scale >= qubit::kUnderflowNorm)) {
      throw PostSelectionUnderflow("joint_probabilities: post-selected norm underflows");
    }
    const Eigen::Vector2cd later = grown / scale;
    const double n2 = later.squaredNorm();
    for (int ia = 0; ia < 2; ++ia) {
      out.p[ia][ib] = wb * (proj[ia] * later).squaredNorm() / n2;
    }
  }
  return out;
}

double correlator_C(const qubit::NHParams& p, double t) {
  const double w = down_weight(p, t);
  return 2.0 * w - 1.0;
}

double correlator_F(const qubit::NHParams& p, double t) {
  const double w = down_weight(p, t);
  return w * correlator_C(p, t) + (1.0 - w) * correlator_C(p, -t);
}

K3Result k3(const qubit::NHParams& p, double t) {
  K3Result r;
  r.C21 = correlator_C(p, t);
  r.C32 = correlator_F(p, t);
  r.C31 = correlator_C(p, 2.0 * t);
  r.K3 = r.C21 + r.C32 - r.C31;
  return r;
}

K3Result k3_joint(const LGProtocol& proto, const qubit::NHParams& p, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("k3_joint: t must be >= 0");
  K3Result r;
  r.C21 = joint_probabilities(proto, p, 0.0, t).correlator();
  r.C32 = joint_probabilities(proto, p, t, 2.0 * t).correlator();
  r.C31 = joint_probabilities(proto, p, 0.0, 2.0 * t).correlator();
  r.K3 = r.C21 + r.C32 - r.C31;
  return r;
}

K3Peak k3_max_over_t(const qubit::NHParams& p, double lo, double hi) {
  check_window(lo, hi);
  const auto f = [&p](double t) { return k3(p, t).K3; };
  std::vector<double> ts;
  const std::vector<double> ks = scan(f, lo, hi, ts);
  for (int i = 1; i + 1 < kScanSamples; ++i) {
    if (!(ks[i] > ks[i - 1] && ks[i] >= ks[i + 1])) continue;
    const double a = ts[i - 1];
    const double b = ts[i + 1];
    const auto coarse = numerics::golden_section_maximize(f, a, b, 1e-10 * (hi - lo));
    const double h = 1e-6 * std::max(hi, 1.0 / p.J());
    const auto slope = [&f, h](double t) { return (f(t + h) - f(t - h)) / (2.0 * h); };
    K3Peak peak{coarse.x, coarse.value, false};
    if (a - h >= 0.0 && slope(a) > 0.0 && slope(b) < 0.0) {
      const double t = numerics::bisect_root(slope, a, b, 1e-14 * (hi - lo));
      peak.t_max = t;
      peak.k3_max = f(t);
    }
    return peak;
  }
  const bool upper = ks.back() >= ks.front();
  return {upper ? hi : lo, upper ? ks.back() : ks.front(), true};
}

K3Peak k3_max_over_t(const qubit::NHParams& p) {
  return k3_max_over_t(p, 0.0, kPi / (2.0 * p.J()));
}

K3Range k3_range(const qubit::NHParams& p, double lo, double hi) {
  check_window(lo, hi);
  const auto f = [&p](double t) { return k3(p, t).K3; };
  std::vector<double> ts;
  const std::vector<double> ks = scan(f, lo, hi, ts);
  const auto imax = std::max_element(ks.begin(), ks.end()) - ks.begin();
  const auto imin = std::min_element(ks.begin(), ks.end()) - ks.begin();
  const auto refine = [&](std::ptrdiff_t i, double sign) {
    const double a = ts[std::max<std::ptrdiff_t>(i - 1, 0)];
    const double b = ts[std::min<std::ptrdiff_t>(i + 1, kScanSamples - 1)];
    const auto g = [&f, sign](double t) { return sign * f(t); };
    auto best = numerics::golden_section_maximize(g, a, b, 1e-10 * (hi - lo));
    if (sign * ks[i] > best.value) best = {ts[i], sign * ks[i]};
    return numerics::ScalarOptimum{best.x, sign * best.value};
  };
  const auto mx = refine(imax, 1.0);
  const auto mn = refine(imin, -1.0);
  return {mn.x, mn.value, mx.x, mx.value};
}

double k3_bloch(const qubit::NHParams& p, double t, double psi_theta, double psi_phi,
                double q_theta, double q_phi) {
  if (!(t >= 0.0)) throw std::invalid_argument("k3_bloch: t must be >= 0");
  const Operator2 g1 = qubit::propagator(p, t);
  const Operator2 g2 = qubit::propagator(p, 2.0 * t);
  const Eigen::Vector2cd v = qubit::QubitState::bloch(psi_theta, psi_phi).amplitudes();
  const Eigen::Vector3d n = axis(q_theta, q_phi);
  const double q0 = n.dot(bloch_of(v));
  const double qt = n.dot(bloch_of(g1 * v));
  return combine(axis_terms(g1, g2, q_theta, q_phi), q0, qt);
}

OptimizedK3 k3_optimized(const qubit::NHParams& p, double t, int grid_resolution) {
  if (grid_resolution < 32) {
    throw std::invalid_argument("k3_optimized: grid resolution must be >= 32");
  }
  if (!(t >= 0.0)) throw std::invalid_argument("k3_optimized: t must be >= 0");
  const int n = grid_resolution;
  const double dtheta = kPi / (n - 1);
  const double dphi = 2.0 * kPi / n;
  const Operator2 g1 = qubit::propagator(p, t);
  const Operator2 g2 = qubit::propagator(p, 2.0 * t);

  std::vector<Eigen::Vector3d> r0(n * n);
  std::vector<Eigen::Vector3d> rt(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2cd v = qubit::QubitState::bloch(i * dtheta, j * dphi).amplitudes();
      r0[i * n + j] = bloch_of(v);
      rt[i * n + j] = bloch_of(g1 * v);
    }
  }

  using Key = std::tuple<int, int, int, int>;  // psi_theta, psi_phi, q_theta, q_phi
  double best = -std::numeric_limits<double>::infinity();
  Key best_key{0, 0, 0, 0};
  for (int qi = 0; qi < n; ++qi) {
    for (int qj = 0; qj < n; ++qj) {
      const AxisTerms terms = axis_terms(g1, g2, qi * dtheta, qj * dphi);
      const Eigen::Vector3d ax = axis(qi * dtheta, qj * dphi);
      for (int k = 0; k < n * n; ++k) {
        const double value = combine(terms, ax.dot(r0[k]), ax.dot(rt[k]));
        const Key key{k / n, k % n, qi, qj};
        if (value > best || (value == best && key < best_key)) {
          best = value;
          best_key = key;
        }
      }
    }
  }

  std::array<double, 4> x = {std::get<0>(best_key) * dtheta, std::get<1>(best_key) * dphi,
                             std::get<2>(best_key) * dtheta, std::get<3>(best_key) * dphi};
  const auto eval = [&](const std::array<double, 4>& y) {
    const Eigen::Vector2cd v = qubit::QubitState::bloch(y[0], y[1]).amplitudes();
    const Eigen::Vector3d ax = axis(y[2], y[3]);
    return combine(axis_terms(g1, g2, y[2], y[3]), ax.dot(bloch_of(v)), ax.dot(bloch_of(g1 * v)));
  };
  std::array<double, 4> step = {dtheta, dphi, dtheta, dphi};
  double fx = eval(x);
  for (int iter = 0; iter < 20000 && step[0] > 1e-10; ++iter) {
    bool improved = false;
    for (int d = 0; d < 4; ++d) {
      for (double dir : {1.0, -1.0}) {
        std::array<double, 4> y = x;
        y[d] += dir * step[d];
        const double fy = eval(y);
        if (fy > fx + 1e-15) {
          x = y;
          fx = fy;
          improved = true;
        }
      }
    }
    if (!improved) {
      for (double& s : step) s *= 0.5;
    }
  }

  OptimizedK3 out;
  out.k3 = std::max(fx, best);
  canonicalize(x[0], x[1]);
  canonicalize(x[2], x[3]);
  out.psi_theta = x[0];
  out.psi_phi = x[1];
  out.q_theta = x[2];
  out.q_phi = x[3];
  out.default_k3 = k3(p, t).K3;
  return out;
}

K3Estimate k3_monte_carlo(const LGProtocol& proto, const traj::JumpModel& model, double t,
                          std::size_t n_shots, std::uint64_t seed,
                          const traj::EnsembleOptions& options) {
  proto.validate();
  if (n_shots == 0) throw std::invalid_argument("k3_monte_carlo: n_shots must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("k3_monte_carlo: t must be > 0");
  const double dt = resolve_dt(model, options);
  const unsigned workers = resolve_workers(options);
  const traj::State start = traj::embed(proto.psi0);

  // Outcome code per shot: 0 rejected in the first stretch, otherwise
  // b-index + 1 in bits 0..1 and a-index + 1 in bits 2..3 (0 if rejected later).
  const auto correlator = [&](double tj, double ti, std::uint64_t stream) {
    const traj::Segment first = traj::make_segment(model, tj, dt);
    const traj::Segment second = traj::make_segment(model, ti - tj, dt);
    std::vector<int> codes(n_shots, 0);
    numerics::parallel_for(n_shots, workers, [&](std::size_t i) {
      traj::LiveTrajectory tr(start, traj::derive_seed(seed, stream, i));
      traj::advance(model, first, tr);
      if (!tr.post_selected) return;
      const int b = traj::measure_observable(proto.observable, tr.psi, tr.rng);
      int code = b == 1 ? 1 : 2;
      traj::advance(model, second, tr);
      if (tr.post_selected) {
        const int a = traj::measure_observable(proto.observable, tr.psi, tr.rng);
        code |= (a == 1 ? 1 : 2) << 2;
      }
      codes[i] = code;
    });

    std::array<std::size_t, 2> n1{0, 0};
    std::array<std::size_t, 2> n2{0, 0};
    std::array<double, 2> sum_a{0.0, 0.0};
    for (int code : codes) {
      if (code == 0) continue;
      const int ib = (code & 3) - 1;
      ++n1[ib];
      const int ia_code = code >> 2;
      if (ia_code == 0) continue;
      ++n2[ib];
      sum_a[ib] += ia_code == 1 ? 1.0 : -1.0;
    }
    CorrelatorEstimate est;
    est.n_shots = n_shots;
    est.n_first = n1[0] + n1[1];
    est.n_both = n2[0] + n2[1];
    if (est.n_first == 0) {
      throw EmptyEnsembleError("k3_monte_carlo: no shot survived to the first measurement", 0.0);
    }
    const double N1 = static_cast<double>(est.n_first);
    const double p_plus = n1[0] / N1;
    std::array<double, 2> m{0.0, 0.0};
    double var = 0.0;
    for (int ib = 0; ib < 2; ++ib) {
      const double pb = ib == 0 ? p_plus : 1.0 - p_plus;
      if (n2[ib] > 0) {
        m[ib] = sum_a[ib] / n2[ib];
        var += pb * pb * (1.0 - m[ib] * m[ib]) / n2[ib];
      } else if (n1[ib] > 0) {
        var += pb * pb;
      }
    }
    var += (m[0] + m[1]) * (m[0] + m[1]) * p_plus * (1.0 - p_plus) / N1;
    est.value = p_plus * m[0] - (1.0 - p_plus) * m[1];
    est.error = std::sqrt(var);
    return est;
  };

  K3Estimate out;
  out.C21 = correlator(0.0, t, 0);
  out.C32 = correlator(t, 2.0 * t, 1);
  out.C31 = correlator(0.0, 2.0 * t, 2);
  out.K3 = out.C21.value + out.C32.value - out.C31.value;
  out.K3_error = std::sqrt(out.C21.error * out.C21.error + out.C32.error * out.C32.error +
                           out.C31.error * out.C31.error);
  return out;
}

}  // namespace nhq::lg
