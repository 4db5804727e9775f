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

// Transit times between |down> and |up> under post-selected evolution and the
// two-level speed limit tau_qsl = pi / (2J).

#include "nhq/nh_qubit.hpp"

#include <optional>
#include <span>
#include <vector>

namespace nhq::qsl {

inline constexpr double kDefaultThreshold = 0.99;

double qsl_time(const qubit::NHParams& p);

/// (1 / Delta) arctan(Delta / gamma), continued through the exceptional point
/// to the artanh branch. Equals pi / (2J) at gamma = 0 and 1 / J at gamma = J.
double transit_down_up(const qubit::NHParams& p);

/// First positive root of cos(Delta T) + (gamma / Delta) sin(Delta T) for
/// gamma < J; std::nullopt for gamma >= J.
std::optional<double> transit_up_down(const qubit::NHParams& p);

struct TransitReport {
  double tau_qsl = 0.0;
  double t_down_up = 0.0;
  std::optional<double> t_up_down;
  std::optional<double> sum_check;  // t_down_up + t_up_down - pi / Delta
};

TransitReport transit_report(const qubit::NHParams& p);

struct TransitSample {
  double t;
  double p_target;
};

/// First time p_target reaches threshold, linearly interpolated. Samples must
/// be ordered in t. Throws std::invalid_argument for fewer than 2 samples.
std::optional<double> transit_from_timeseries(std::span<const TransitSample> samples,
                                              double threshold = kDefaultThreshold);

/// Closed-form p_up(t) after starting in |down> (or p_down after |up>).
std::vector<TransitSample> transit_series(const qubit::NHParams& p, bool from_down,
                                          std::span<const double> times);

struct AsymptoteFit {
  double constant = 0.0;          // c in T ~ ln(c gamma / J) / gamma
  std::vector<double> pointwise;  // (J / gamma) exp(gamma T) per gamma
};

/// Fits c from transit_down_up at the given (large) gamma values.
AsymptoteFit fit_asymptote_constant(double J, std::span<const double> gammas);

}  // namespace nhq::qsl
