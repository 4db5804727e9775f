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


#include "experiments.hpp"

#include "nhq/errors.hpp"
#include "nhq/leggett_garg.hpp"
#include "nhq/nh_qubit.hpp"
#include "nhq/numerics.hpp"
#include "nhq/open_system.hpp"
#include "nhq/speed_limit.hpp"
#include "nhq/trajectories.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nhq::harness {

namespace {

constexpr const char* kRatio = "gamma/J";
constexpr const char* kTime = "1/J";
constexpr const char* kUnitless = "1";
constexpr const char* kProbability = "probability";
constexpr const char* kRad = "rad";

unsigned workers(const RunConfig& c) {
  return c.workers == 0 ? numerics::default_workers() : c.workers;
}

qubit::NHParams nh(const RunConfig& c, double g) { return qubit::NHParams(c.J, g * c.J); }

std::vector<double> times(const RunConfig& c) {
  std::vector<double> ts = c.jt_grid.values();
  for (double& t : ts) t /= c.J;
  return ts;
}

open::IonParams ion(const RunConfig& c, double g, double width_ratio) {
  open::IonParams p = open::ion_for_gamma(c.J, g * c.J, width_ratio, c.branching);
  return c.backflow ? p : open::without_backflow(p);
}

traj::JumpModel jump_model(const RunConfig& c, double g) {
  if (c.model == "effective") return traj::effective_model(nh(c, g));
  const open::IonParams p = ion(c, g, c.width_ratio);
  return c.model == "full" ? traj::full_model(p) : traj::eliminated_model(p);
}

traj::EnsembleOptions ensemble_options(const RunConfig& c, const traj::JumpModel& m) {
  return {c.dt_over_default * m.default_dt(), workers(c)};
}

// One row per (gamma, t) pair, computed in parallel into ordered slots.
template <typename Fn>
void sweep(const RunConfig& c, Table& t, Fn&& fn) {
  const std::vector<double> jt = c.jt_grid.values();
  const std::size_t n = c.gamma_over_j.size() * jt.size();
  std::vector<Row> rows(n);
  numerics::parallel_for(n, workers(c), [&](std::size_t k) {
    rows[k] = fn(c.gamma_over_j[k / jt.size()], jt[k % jt.size()]);
  });
  for (Row& r : rows) t.add(std::move(r));
}

template <typename Fn>
void sweep_gamma(const RunConfig& c, Table& t, Fn&& fn) {
  const std::size_t n = c.gamma_over_j.size();
  std::vector<Row> rows(n);
  numerics::parallel_for(n, workers(c), [&](std::size_t k) { rows[k] = fn(c.gamma_over_j[k]); });
  for (Row& r : rows) t.add(std::move(r));
}

Cell maybe(const std::optional<double>& x) {
  if (x) return *x;
  return std::monostate{};
}

Cell count(std::size_t n) { return static_cast<std::int64_t>(n); }

Table phase_diagram(const RunConfig& c) {
  Table t{{{"gamma_over_J", kRatio}, {"deltaP", kProbability}, {"phase", kUnitless}}, {}};
  sweep_gamma(c, t, [&](double g) -> Row {
    const auto p = nh(c, g);
    const double dp = qubit::population_transfers(p, c.probe_jt / c.J).delta_p;
    return {g, dp, std::string(qubit::to_string(qubit::probe_phase(p, c.probe_jt)))};
  });
  return t;
}

Table delta_fit(const RunConfig& c) {
  Table t{{{"gamma_over_J", kRatio},
           {"abs_delta", "J"},
           {"abs_delta_exact", "J"},
           {"relative_error", kUnitless},
           {"sign", kUnitless},
           {"coefficient", "J^2"}},
          {}};
  const std::vector<double> ts = times(c);
  sweep_gamma(c, t, [&](double g) -> Row {
    const auto p = nh(c, g);
    const auto fit = qubit::fit_delta(qubit::delta_p_samples(p, ts));
    const double exact = std::sqrt(std::abs(p.delta_squared()));
    const double rel = exact > 0.0 ? std::abs(fit.abs_delta - exact) / exact : fit.abs_delta;
    return {g, fit.abs_delta / c.J, exact / c.J, rel, static_cast<std::int64_t>(fit.sign),
            fit.coefficient / (c.J * c.J)};
  });
  return t;
}

Table p_down_series(const RunConfig& c) {
  Table t{{{"gamma_over_J", kRatio},
           {"Jt", kUnitless},
           {"p_down_nh", kProbability},
           {"p_down_lindblad", kProbability},
           {"p_down_no_backflow", kProbability}},
          {}};
  const std::vector<double> jt = c.jt_grid.values();
  const std::vector<double> ts = times(c);
  const qubit::QubitState psi0 = initial_state(c);
  std::vector<std::vector<Row>> blocks(c.gamma_over_j.size());
  numerics::parallel_for(blocks.size(), workers(c), [&](std::size_t k) {
    const double g = c.gamma_over_j[k];
    const open::IonParams with = open::ion_for_gamma(c.J, g * c.J, c.width_ratio, c.branching);
    const open::IonParams without = open::without_backflow(with);
    const auto rho0 = open::DensityMatrix::from_qubit(psi0, 4);
    const auto a = open::evolve_density(open::build_lindbladian_4(with), rho0, ts);
    const auto b = open::evolve_density(open::build_lindbladian_4(without), rho0, ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double nh_down = qubit::evolve(nh(c, g), psi0, ts[i]).prob_down();
      blocks[k].push_back({g, jt[i], nh_down, a[i].qubit_p_down(), b[i].qubit_p_down()});
    }
  });
  for (auto& block : blocks) {
    for (Row& r : block) t.add(std::move(r));
  }
  return t;
}

Table k3_scan(const RunConfig& c) {
  Table t{{{"gamma_over_J", kRatio},
           {"Jt", kUnitless},
           {"C21", kUnitless},
           {"C32", kUnitless},
           {"C31", kUnitless},
           {"K3", kUnitless}},
          {}};
  lg::LGProtocol proto;
  proto.psi0 = initial_state(c);
  const bool closed = c.initial_state == "down";
  sweep(c, t, [&](double g, double jt) -> Row {
    const auto p = nh(c, g);
    const lg::K3Result r = closed ? lg::k3(p, jt / c.J) : lg::k3_joint(proto, p, jt / c.J);
    return {g, jt, r.C21, r.C32, r.C31, r.K3};
  });
  return t;
}

Table k3_optimize(const RunConfig& c) {
  Table t{{{"gamma_over_J", kRatio},
           {"Jt", kUnitless},
           {"K3_default", kUnitless},
           {"K3_optimized", kUnitless},
           {"psi_theta", kRad},
           {"psi_phi", kRad},
           {"q_theta", kRad},
           {"q_phi", kRad}},
          {}};
  sweep(c, t, [&](double g, double jt) -> Row {
    const auto o = lg::k3_optimized(nh(c, g), jt / c.J, c.resolution);
    return {g, jt, o.default_k3, o.k3, o.psi_theta, o.psi_phi, o.q_theta, o.q_phi};
  });
  return t;
}

Table k3_montecarlo(const RunConfig& c) {
  Table t{{{"gamma_over_J", kRatio},
           {"Jt", kUnitless},
           {"K3", kUnitless},
           {"K3_err", kUnitless},
           {"K3_exact", kUnitless},
           {"C21", kUnitless},
           {"C21_err", kUnitless},
           {"C32", kUnitless},
           {"C32_err", kUnitless},
           {"C31", kUnitless},
           {"C31_err", kUnitless},
           {"shots", "count"}},
          {}};
  lg::LGProtocol proto;
  proto.psi0 = initial_state(c);
  const std::vector<double> jt = c.jt_grid.values();
  for (std::size_t gi = 0; gi < c.gamma_over_j.size(); ++gi) {
    const double g = c.gamma_over_j[gi];
    const traj::JumpModel model = jump_model(c, g);
    const traj::EnsembleOptions opts = ensemble_options(c, model);
    for (std::size_t i = 0; i < jt.size(); ++i) {
      const std::uint64_t seed = traj::derive_seed(c.seed, gi, i);
      const auto e = lg::k3_monte_carlo(proto, model, jt[i] / c.J, c.shots, seed, opts);
      const double exact = lg::k3_joint(proto, nh(c, g), jt[i] / c.J).K3;
      t.add({g, jt[i], e.K3, e.K3_error, exact, e.C21.value, e.C21.error, e.C32.value,
             e.C32.error, e.C31.value, e.C31.error, count(c.shots)});
    }
  }
  return t;
}

Table transit(const RunConfig& c) {
  Table t{{{"gamma_over_J", kRatio},
           {"tau_qsl", kTime},
           {"t_down_up", kTime},
           {"t_up_down", kTime}},
          {}};
  sweep_gamma(c, t, [&](double g) -> Row {
    const auto r = qsl::transit_report(nh(c, g));
    std::optional<double> up_down = r.t_up_down;
    if (up_down) *up_down *= c.J;
    return {g, r.tau_qsl * c.J, r.t_down_up * c.J, maybe(up_down)};
  });
  return t;
}

Table lindblad_compare(const RunConfig& c) {
  Table t{{{"gamma_over_J", kRatio},
           {"width_ratio", "gamma_g/J_A"},
           {"max_dev_4v2", kProbability},
           {"mean_dev_4v2", kProbability},
           {"max_dev_3v2", kProbability},
           {"max_dev_4v3", kProbability},
           {"rate_factor_assumed", kUnitless},
           {"rate_factor_fitted", kUnitless},
           {"max_dev_assumed", kProbability},
           {"max_dev_fitted", kProbability}},
          {}};
  const std::vector<double> ts = times(c);
  const qubit::QubitState psi0 = initial_state(c);
  const std::size_t nr = c.width_ratios.size();
  std::vector<Row> rows(c.gamma_over_j.size() * nr);
  numerics::parallel_for(rows.size(), workers(c), [&](std::size_t k) {
    const double g = c.gamma_over_j[k / nr];
    const double ratio = c.width_ratios[k % nr];
    const auto dev = open::compare_models(ion(c, g, ratio), psi0, ts);
    const auto cal = open::calibrate_loss_rate(nh(c, g), psi0, ts);
    rows[k] = {g,
               ratio,
               dev.max_four_vs_two,
               dev.mean_four_vs_two,
               dev.max_three_vs_two,
               dev.max_four_vs_three,
               cal.assumed,
               cal.fitted,
               cal.deviation_assumed,
               cal.deviation_fitted};
  });
  for (Row& r : rows) t.add(std::move(r));
  return t;
}

Table trajectories(const RunConfig& c) {
  Table t{{{"gamma_over_J", kRatio},
           {"Jt", kUnitless},
           {"p_down_with", kProbability},
           {"p_down_without", kProbability},
           {"deviation", kProbability},
           {"deviation_err", kProbability},
           {"n_with", "count"},
           {"n_without", "count"},
           {"p_down_nh", kProbability}},
          {}};
  const std::vector<double> jt = c.jt_grid.values();
  const std::vector<double> ts = times(c);
  const qubit::QubitState psi0 = initial_state(c);
  for (std::size_t gi = 0; gi < c.gamma_over_j.size(); ++gi) {
    const double g = c.gamma_over_j[gi];
    const traj::JumpModel model = jump_model(c, g);
    const std::uint64_t seed = traj::derive_seed(c.seed, gi, 0);
    const auto devs =
        traj::backflow_deviation(model, psi0, ts, c.shots, seed, ensemble_options(c, model));
    for (std::size_t i = 0; i < devs.size(); ++i) {
      const auto& d = devs[i];
      const double nh_down = qubit::evolve(nh(c, g), psi0, ts[i]).prob_down();
      t.add({g, jt[i], d.p_with, d.p_without, d.deviation, d.error, count(d.n_with),
             count(d.n_without), nh_down});
    }
  }
  return t;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

Table run_experiment(const RunConfig& c) {
  switch (c.experiment) {
    case Experiment::kPhaseDiagram:
      return phase_diagram(c);
    case Experiment::kDeltaFit:
      return delta_fit(c);
    case Experiment::kPDownSeries:
      return p_down_series(c);
    case Experiment::kK3Scan:
      return k3_scan(c);
    case Experiment::kK3Optimize:
      return k3_optimize(c);
    case Experiment::kK3MonteCarlo:
      return k3_montecarlo(c);
    case Experiment::kTransit:
      return transit(c);
    case Experiment::kLindbladCompare:
      return lindblad_compare(c);
    case Experiment::kTrajectories:
      return trajectories(c);
  }
  throw std::logic_error("run_experiment: unhandled experiment");
}

std::string manifest_path(const std::string& data_file) { return data_file + ".manifest.json"; }

std::string default_output(const RunConfig& c) {
  return std::string(to_string(c.experiment)) + (c.format == Format::kCsv ? ".csv" : ".json");
}

nlohmann::json make_manifest(const RunConfig& c, const Table& t, const std::string& data_file) {
  nlohmann::json m;
  m["experiment"] = std::string(to_string(c.experiment));
  m["resolved_params"] = to_json(c);
  m["resolved_params"]["out"] = data_file;
  m["seed"] = c.seed;
  m["grid"] = {{"gamma_over_j", c.gamma_over_j},
               {"jt", c.jt_grid.values()},
               {"jt_range", {{"lo", c.jt_grid.lo}, {"hi", c.jt_grid.hi}, {"step", c.jt_grid.step}}}};
  m["artifact_version"] = kArtifactVersion;
  m["data_file"] = data_file;
  m["column_units"] = column_units(t);
  m["timestamp"] = timestamp();
  return m;
}

int run(const RunConfig& config, std::ostream& err) {
  RunConfig c = config;
  try {
    c.validate();
  } catch (const ConfigError& e) {
    err << "nhqubit: invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
  if (c.out.empty()) c.out = default_output(c);

  std::ofstream data(c.out, std::ios::binary | std::ios::trunc);
  if (!data) {
    err << "nhqubit: cannot write '" << c.out << "'\n";
    return kExitUnwritable;
  }
  std::ofstream manifest(manifest_path(c.out), std::ios::binary | std::ios::trunc);
  if (!manifest) {
    err << "nhqubit: cannot write '" << manifest_path(c.out) << "'\n";
    return kExitUnwritable;
  }

  Table table;
  try {
    table = run_experiment(c);
  } catch (const PostSelectionUnderflow& e) {
    err << "nhqubit: " << e.what() << '\n';
    return kExitUnderflow;
  } catch (const EmptyEnsembleError& e) {
    err << "nhqubit: " << e.what() << '\n';
    return kExitUnderflow;
  } catch (const std::overflow_error& e) {
    err << "nhqubit: " << e.what() << '\n';
    return kExitUnderflow;
  } catch (const std::invalid_argument& e) {
    err << "nhqubit: invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "nhqubit: " << e.what() << '\n';
    return kExitInternal;
  }

  if (c.format == Format::kCsv) {
    write_csv(table, data);
  } else {
    write_json(table, data);
  }
  manifest << make_manifest(c, table, c.out).dump(2) << '\n';
  data.flush();
  manifest.flush();
  if (!data || !manifest) {
    err << "nhqubit: write to '" << c.out << "' failed\n";
    return kExitUnwritable;
  }
  return kExitOk;
}

}  // namespace nhq::harness
