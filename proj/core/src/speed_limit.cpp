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


#include "nhq/speed_limit.hpp"

#include "nhq/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nhq::qsl {

namespace {

// atan(sqrt(z)) / sqrt(z), continued to z <= 0.
double arctan_ratio(double z) {
  if (std::abs(z) < 1e-4) {
    return 1.0 - z / 3.0 + z * z / 5.0 - z * z * z / 7.0;
  }
  if (z > 0.0) {
    const double r = std::sqrt(z);
    return std::atan(r) / r;
  }
  const double r = std::sqrt(-z);
  return std::atanh(r) / r;
}

}  // namespace

double qsl_time(const qubit::NHParams& p) { return std::numbers::pi / (2.0 * p.J()); }

double transit_down_up(const qubit::NHParams& p) {
  if (p.gamma() == 0.0) return qsl_time(p);
  const double z = p.delta_squared() / (p.gamma() * p.gamma());
  return arctan_ratio(z) / p.gamma();
}

std::optional<double> transit_up_down(const qubit::NHParams& p) {
  if (p.gamma() >= p.J()) return std::nullopt;
  if (p.gamma() == 0.0) return qsl_time(p);
  const double delta = std::sqrt(p.delta_squared());
  const double ratio = p.gamma() / delta;
  const auto f = [delta, ratio](double t) {
    return std::cos(delta * t) + ratio * std::sin(delta * t);
  };
  return numerics::bisect_root(f, transit_down_up(p), std::numbers::pi / delta, 1e-12);
}

TransitReport transit_report(const qubit::NHParams& p) {
  TransitReport r;
  r.tau_qsl = qsl_time(p);
  r.t_down_up = transit_down_up(p);
  r.t_up_down = transit_up_down(p);
  if (r.t_up_down) {
    r.sum_check = r.t_down_up + *r.t_up_down - std::numbers::pi / std::sqrt(p.delta_squared());
  }
  return r;
}

std::optional<double> transit_from_timeseries(std::span<const TransitSample> samples,
                                              double threshold) {
  if (samples.size() < 2) {
    throw std::invalid_argument("transit_from_timeseries: need at least 2 samples");
  }
  if (samples.front().p_target >= threshold) return samples.front().t;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto& a = samples[i - 1];
    const auto& b = samples[i];
    if (b.t < a.t) throw std::invalid_argument("transit_from_timeseries: samples out of order");
    if (b.p_target >= threshold) {
      const double w = (threshold - a.p_target) / (b.p_target - a.p_target);
      return a.t + w * (b.t - a.t);
    }
  }
  return std::nullopt;
}

std::vector<TransitSample> transit_series(const qubit::NHParams& p, bool from_down,
                                          std::span<const double> times) {
  const qubit::QubitState start = from_down ? qubit::QubitState::down() : qubit::QubitState::up();
  std::vector<TransitSample> out;
  out.reserve(times.size());
  for (double t : times) {
    const qubit::QubitState s = qubit::evolve(p, start, t);
    out.push_back({t, from_down ? s.prob_up() : s.prob_down()});
  }
  return out;
}

AsymptoteFit fit_asymptote_constant(double J, std::span<const double> gammas) {
  if (gammas.empty()) throw std::invalid_argument("fit_asymptote_constant: no gamma values");
  AsymptoteFit fit;
  double log_sum = 0.0;
  for (double g : gammas) {
    const double t = transit_down_up(qubit::NHParams(J, g));
    const double c = (J / g) * std::exp(g * t);
    fit.pointwise.push_back(c);
    log_sum += std::log(c);
  }
  fit.constant = std::exp(log_sum / static_cast<double>(gammas.size()));
  return fit;
}

}  // namespace nhq::qsl
