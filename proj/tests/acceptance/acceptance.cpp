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


// Acceptance report: one PASS/FAIL line per criterion. Exit status is
// non-zero when any line fails.

#include "harness/config.hpp"
#include "harness/experiments.hpp"
#include "nhq/leggett_garg.hpp"
#include "nhq/nh_qubit.hpp"
#include "nhq/open_system.hpp"
#include "nhq/speed_limit.hpp"
#include "nhq/trajectories.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nhq::qubit::NHParams;
using nhq::qubit::QubitState;
namespace lg = nhq::lg;
namespace open = nhq::open;
namespace qsl = nhq::qsl;
namespace traj = nhq::traj;
namespace harness = nhq::harness;

constexpr double kPi = std::numbers::pi;
constexpr double kJ = 1.0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// C1
Verdict lueder_point() {
  const auto peak = lg::k3_max_over_t({kJ, 0.0});
  const double dt = std::abs(kJ * peak.t_max - kPi / 6);
  const double dk = std::abs(peak.k3_max - 1.5);
  return {dt <= 1e-9 && dk <= 1e-9 && !peak.at_boundary,
          fmt("Jt_max=%.12f (|d|=%.1e), K3_max=%.12f (|d|=%.1e), tol 1e-9", kJ * peak.t_max, dt,
              peak.k3_max, dk)};
}

// C2
Verdict small_gamma_slope() {
  const double g = 1e-3;
  const double slope = (lg::k3_max_over_t({kJ, g * kJ}).k3_max - 1.5) / g;
  const double target = 7 * std::sqrt(3.0) / 8;
  const double rel = std::abs(slope - target) / target;
  return {rel <= 0.02, fmt("slope=%.6f at gamma/J=1e-3, target 7*sqrt(3)/8=%.6f, rel err %.3f, tol 0.02",
                           slope, target, rel)};
}

// C3
Verdict exceedance() {
  const std::vector<double> gammas{0.5, 0.88, 1.0, 1.56, 2.0};
  bool above = true;
  bool decreasing = true;
  double prev = 1e300;
  std::string values;
  for (double g : gammas) {
    const auto peak = lg::k3_max_over_t({kJ, g * kJ});
    above = above && peak.k3_max > 1.5;
    decreasing = decreasing && peak.t_max < prev;
    prev = peak.t_max;
    values += fmt(" %.2f:(Jt=%.6f,K3=%.6f)", g, kJ * peak.t_max, peak.k3_max);
  }
  const double half = 0.5 * kPi / 6;
  const bool halved = kJ * prev < half;
  return {above && decreasing && halved,
          fmt("K3_max>1.5:%s, t_max decreasing:%s, Jt_max(2)=%.6f < %.6f:%s;", above ? "yes" : "no",
              decreasing ? "yes" : "no", kJ * prev, half, halved ? "yes" : "no") +
              values};
}

// C4
Verdict closed_vs_joint() {
  const auto gammas = linspace(0.0, 3.0, 300);
  const auto times = linspace(0.0, 3.0, 300);
  const lg::LGProtocol proto;
  double worst = 0.0;
  for (double g : gammas) {
    const NHParams p{kJ, g * kJ};
    for (double jt : times) {
      const double d = std::abs(lg::k3(p, jt / kJ).K3 - lg::k3_joint(proto, p, jt / kJ).K3);
      worst = std::max(worst, std::isnan(d) ? 1e300 : d);
    }
  }
  return {worst <= 1e-10, fmt("max |K3_closed - K3_joint| = %.2e over 300x300, tol 1e-10", worst)};
}

// C5
Verdict monte_carlo() {
  constexpr std::size_t kShots = 100000;
  bool ok = true;
  std::string detail;
  for (double g : {0.88, 1.56}) {
    const NHParams p{kJ, g * kJ};
    const double t = lg::k3_max_over_t(p).t_max;
    const auto model = traj::eliminated_model(open::without_backflow(open::ion_for_gamma(kJ, g * kJ, 100.0)));
    const auto est = lg::k3_monte_carlo({}, model, t, kShots, 20260501);
    const double exact = lg::k3(p, t).K3;
    const double z = std::abs(est.K3 - exact) / est.K3_error;
    ok = ok && z <= 3.0;
    detail += fmt("gamma/J=%.2f Jt=%.4f: MC %.4f +- %.4f vs %.4f (%.2f sigma); ", g, kJ * t, est.K3,
                  est.K3_error, exact, z);
  }
  return {ok, detail + "tol 3 sigma, 1e5 shots"};
}

// C6
Verdict phase_diagnostic() {
  const double dp_09 = nhq::qubit::population_transfers({kJ, 0.9 * kJ}, 0.1 / kJ).delta_p;
  const double dp_11 = nhq::qubit::population_transfers({kJ, 1.1 * kJ}, 0.1 / kJ).delta_p;
  bool ok = dp_09 > 0 && dp_11 < 0;
  std::string detail = fmt("dP(0.9)=%+.3e dP(1.1)=%+.3e; ", dp_09, dp_11);
  std::vector<double> times;
  for (int i = 1; i <= 5; ++i) times.push_back(0.02 * i / kJ);
  for (double g : {0.5, 1.5}) {
    const NHParams p{kJ, g * kJ};
    const auto fit = nhq::qubit::fit_delta(nhq::qubit::delta_p_samples(p, times));
    const double exact = std::sqrt(std::abs(kJ * kJ - p.gamma() * p.gamma()));
    const double rel = std::abs(fit.abs_delta - exact) / exact;
    ok = ok && rel <= 0.005;
    detail += fmt("|Delta|(%.1f)=%.6f vs %.6f rel %.2e; ", g, fit.abs_delta, exact, rel);
  }
  return {ok, detail + "tol 0.5%"};
}

// C7
Verdict adiabatic_elimination() {
  const auto grid = linspace(0.0, kPi / kJ, 101);
  bool ok = true;
  double worst = 0.0;
  std::string detail;
  for (const auto& [name, psi] : {std::pair{"up", QubitState::up()}, std::pair{"down", QubitState::down()}}) {
    for (double g : {0.18, 0.37, 0.73}) {
      double prev = 1e300;
      for (double ratio : {10.0, 30.0, 100.0}) {
        const auto ion = open::without_backflow(open::ion_for_gamma(kJ, g * kJ, ratio));
        const double dev = open::compare_models(ion, psi, grid).max_four_vs_two;
        ok = ok && dev < prev;
        prev = dev;
      }
      ok = ok && prev <= 1e-2;
      worst = std::max(worst, prev);
      detail += fmt("%s/%.2f:%.1e ", name, g, prev);
    }
  }
  return {ok, fmt("max dev at ratio 100 = %.2e (tol 1e-2), monotone over 10/30/100; ", worst) + detail};
}

// C8
Verdict transit_times() {
  const double t_ep = qsl::transit_down_up({kJ, kJ});
  bool ok = std::abs(kJ * t_ep - 1.0) <= 1e-9;
  double worst_sum = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const auto r = qsl::transit_report({kJ, 0.1 * i * kJ});
    const double s = r.sum_check ? std::abs(*r.sum_check) : 1e300;
    worst_sum = std::max(worst_sum, s);
  }
  ok = ok && worst_sum <= 1e-10;
  bool none = true;
  for (double g : {1.0, 1.5, 2.0}) none = none && !qsl::transit_up_down({kJ, g * kJ});
  ok = ok && none;
  return {ok, fmt("J*T_du(EP)=%.12f (tol 1e-9), max |sum rule| = %.1e (tol 1e-10), T_ud none for "
                  "gamma>=J: %s",
                  kJ * t_ep, worst_sum, none ? "yes" : "no")};
}

// C9
Verdict unitary_range() {
  const auto r = lg::k3_range({kJ, 0.0}, 0.0, kPi / kJ);
  const double dmin = std::abs(r.k3_min + 3.0);
  const double dmax = std::abs(r.k3_max - 1.5);
  return {dmin <= 1e-9 && dmax <= 1e-9,
          fmt("min %.12f at Jt=%.6f, max %.12f at Jt=%.6f, tol 1e-9", r.k3_min, kJ * r.t_min,
              r.k3_max, kJ * r.t_max)};
}

// C10
Verdict optimized_surface() {
  const NHParams p{kJ, 2.0 * kJ};
  bool exists = false;
  bool dominates = true;
  double best_late = -1e300;
  double best_late_t = 0.0;
  for (int i = 1; i <= 30; ++i) {
    const double jt = 0.05 * i;
    const auto o = lg::k3_optimized(p, jt / kJ, 64);
    dominates = dominates && o.k3 >= o.default_k3;
    if (jt > kPi / 6 && o.k3 > best_late) {
      best_late = o.k3;
      best_late_t = jt;
    }
    exists = exists || (jt > kPi / 6 && o.k3 > 1.5);
  }
  return {exists && dominates,
          fmt("best optimized K3 beyond pi/6: %.4f at Jt=%.2f (> 1.5: %s); optimized >= default on "
              "all 30 points: %s",
              best_late, best_late_t, exists ? "yes" : "no", dominates ? "yes" : "no")};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// C11
Verdict determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "nhqubit_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ostringstream err;
  harness::RunConfig first = harness::defaults_for(harness::Experiment::kK3MonteCarlo);
  first.out = (dir / "first.csv").string();
  first.workers = 1;
  int rc = harness::run(first, err);
  std::vector<std::string> outputs{slurp(first.out)};
  for (unsigned workers : {2u, 4u, 8u}) {
    harness::RunConfig again = harness::load_config_file(harness::manifest_path(first.out));
    again.out = (dir / ("w" + std::to_string(workers) + ".csv")).string();
    again.workers = workers;
    rc = std::max(rc, harness::run(again, err));
    outputs.push_back(slurp(again.out));
  }
  bool same = !outputs[0].empty();
  for (const auto& o : outputs) same = same && o == outputs[0];
  fs::remove_all(dir);
  return {rc == 0 && same, fmt("exit %d, %zu bytes, workers 1/2/4/8 identical: %s%s", rc,
                               outputs[0].size(), same ? "yes" : "no",
                               err.str().empty() ? "" : (" (" + err.str() + ")").c_str())};
}

// C12
Verdict backflow_ordering() {
  constexpr std::size_t kShots = 200000;
  const std::vector<double> grid{5.0 / kJ};
  std::vector<traj::PairedDeviation> d;
  for (double g : {0.18, 0.73}) {
    d.push_back(traj::backflow_deviation(open::ion_for_gamma(kJ, g * kJ, 100.0), grid, kShots,
                                         20260502)[0]);
  }
  const double gap = std::abs(d[1].deviation) - std::abs(d[0].deviation);
  const double sigma = std::hypot(d[0].error, d[1].error);
  return {gap > 3 * sigma,
          fmt("Jt=5: dev(0.18)=%+.4f+-%.4f (n=%zu), dev(0.73)=%+.4f+-%.4f (n=%zu); gap %.4f vs 3 "
              "sigma %.4f",
              d[0].deviation, d[0].error, d[0].n_with, d[1].deviation, d[1].error, d[1].n_with, gap,
              3 * sigma)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Verdict()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "lueder-point", 1, lueder_point},
      {2, "small-gamma-slope", 1, small_gamma_slope},
      {3, "super-quantum-exceedance", 5, exceedance},
      {4, "closed-vs-joint", 30, closed_vs_joint},
      {5, "monte-carlo-concordance", 300, monte_carlo},
      {6, "phase-diagnostic", 1, phase_diagnostic},
      {7, "adiabatic-elimination", 30, adiabatic_elimination},
      {8, "transit-times", 1, transit_times},
      {9, "unitary-k3-range", 1, unitary_range},
      {10, "optimized-k3-surface", 120, optimized_surface},
      {11, "determinism", 60, determinism},
      {12, "backflow-ordering", 300, backflow_ordering},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = v.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("[%s] %2d %-26s %s; runtime %.2f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id,
                c.name, v.detail.c_str(), secs, c.budget_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}
