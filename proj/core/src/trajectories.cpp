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

#include "nhq/trajectories.hpp"

#include "nhq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nhq::traj {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

unsigned resolve_workers(const EnsembleOptions& options) {
  return options.workers == 0 ? numerics::default_workers() : options.workers;
}

double resolve_dt(const JumpModel& model, const EnsembleOptions& options) {
  return options.dt > 0.0 ? options.dt : model.default_dt();
}

void require_shots(std::size_t n_shots) {
  if (n_shots == 0) throw std::invalid_argument("n_shots must be >= 1");
}

// Outcome codes for a single read-out shot.
enum : std::uint8_t { kRejected = 0, kSelectedUp = 1, kSelectedDown = 2 };

std::uint8_t run_readout_shot(const JumpModel& model, const Segment& segment, const State& psi0,
                              Basis basis, std::uint64_t seed) {
  LiveTrajectory tr(psi0, seed);
  advance(model, segment, tr);
  if (!tr.post_selected) return kRejected;
  return read_out(tr.psi, basis, tr.rng) ? kSelectedDown : kSelectedUp;
}

EnsembleEstimate summarize(const std::vector<std::uint8_t>& codes, Basis basis) {
  EnsembleEstimate out;
  out.n_shots = codes.size();
  std::size_t downs = 0;
  for (auto c : codes) {
    if (c != kRejected) ++out.n_selected;
    if (c == kSelectedDown) ++downs;
  }
  out.fraction_selected = binomial(out.n_selected, out.n_shots);
  if (out.n_selected > 0) {
    (basis == Basis::kZ ? out.p_down : out.p_minus) = binomial(downs, out.n_selected);
  }
  return out;
}

std::vector<std::uint8_t> readout_codes(const JumpModel& model, const State& psi0, Basis basis,
                                        double t, std::size_t n_shots, std::uint64_t seed,
                                        std::uint64_t stream, const EnsembleOptions& options) {
  const Segment segment = make_segment(model, t, resolve_dt(model, options));
  std::vector<std::uint8_t> codes(n_shots);
  numerics::parallel_for(n_shots, resolve_workers(options), [&](std::size_t i) {
    codes[i] = run_readout_shot(model, segment, psi0, basis, derive_seed(seed, stream, i));
  });
  return codes;
}

}  // namespace

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::kToGround:
      return "to_g";
    case Channel::kToD3:
      return "to_D3";
    case Channel::kBackUp:
      return "back_up";
    case Channel::kBackDown:
      return "back_down";
  }
  return "unknown";
}

std::string_view to_string(Basis b) { return b == Basis::kZ ? "z" : "x"; }

JumpModel full_model(const open::IonParams& p) {
  p.validate();
  JumpModel m;
  m.name = "full";
  m.h_eff = open::hamiltonian_4(p);
  m.h_eff(open::kAux, open::kAux) -= 0.5 * kI * p.total_width();
  const RankOneJump candidates[] = {
      {Channel::kToGround, open::kGround, open::kAux, p.gamma_g},
      {Channel::kToD3, open::kGround, open::kAux, p.gamma_d3},
      {Channel::kBackUp, open::kUp, open::kAux, p.gamma_up},
      {Channel::kBackDown, open::kDown, open::kAux, p.gamma_down},
  };
  for (const auto& j : candidates) {
    if (j.rate > 0.0) m.jumps.push_back(j);
  }
  m.max_rate = std::max({p.J, p.J_A, p.total_width()});
  return m;
}

JumpModel eliminated_model(const open::IonParams& p) {
  p.validate();
  JumpModel m;
  m.name = "eliminated";
  m.h_eff = Generator::Zero();
  m.h_eff(open::kUp, open::kDown) = m.h_eff(open::kDown, open::kUp) = p.J;
  double total = 0.0;
  if (p.J_A > 0.0) {
    const double width = p.total_width();
    const double scale = 4.0 * p.J_A * p.J_A / (width * width);
    const RankOneJump candidates[] = {
        {Channel::kToGround, open::kGround, open::kDown, scale * p.gamma_g},
        {Channel::kToD3, open::kGround, open::kDown, scale * p.gamma_d3},
        {Channel::kBackUp, open::kUp, open::kDown, scale * p.gamma_up},
        {Channel::kBackDown, open::kDown, open::kDown, scale * p.gamma_down},
    };
    for (const auto& j : candidates) {
      if (j.rate > 0.0) {
        m.jumps.push_back(j);
        total += j.rate;
      }
    }
  }
  m.h_eff(open::kDown, open::kDown) = -0.5 * kI * total;
  m.max_rate = std::max(p.J, total);
  return m;
}

JumpModel effective_model(const qubit::NHParams& p) {
  JumpModel m;
  m.name = "effective";
  const double loss = open::kLossRatePerGamma * p.gamma();
  m.h_eff = Generator::Zero();
  m.h_eff(open::kUp, open::kDown) = m.h_eff(open::kDown, open::kUp) = p.J();
  m.h_eff(open::kDown, open::kDown) = -0.5 * kI * loss;
  if (loss > 0.0) m.jumps.push_back({Channel::kToGround, open::kGround, open::kDown, loss});
  m.max_rate = std::max(p.J(), loss);
  return m;
}

JumpModel backflow_as_loss(const JumpModel& model) {
  JumpModel twin = model;
  twin.name = model.name + "-detected-backflow";
  for (auto& j : twin.jumps) {
    if (!is_detectable(j.channel)) {
      j.channel = Channel::kToGround;
      j.target = open::kGround;
    }
  }
  return twin;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

Segment make_segment(const JumpModel& model, double duration, double dt) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("make_segment: duration must be finite and >= 0");
  }
  if (!(dt > 0.0) || dt > model.default_dt() * (1.0 + 1e-12)) {
    throw std::invalid_argument("make_segment: dt = " + std::to_string(dt) +
                                " violates dt <= 0.01 / max_rate = " +
                                std::to_string(model.default_dt()));
  }
  Segment s;
  s.duration = duration;
  if (duration == 0.0) return s;
  s.steps = static_cast<int>(std::ceil(duration / dt - 1e-9));
  s.steps = std::max(s.steps, 1);
  s.step_dt = duration / s.steps;
  s.propagator = numerics::expm(Generator(-kI * model.h_eff), s.step_dt);
  return s;
}

void advance(const JumpModel& model, const Segment& segment, LiveTrajectory& traj) {
  const double start = traj.time;
  for (int k = 0; k < segment.steps && traj.post_selected; ++k) {
    double total = 0.0;
    for (const auto& j : model.jumps) total += j.rate * std::norm(traj.psi(j.source));
    total *= segment.step_dt;
    const double u = traj.rng.uniform();
    const double t_next = start + (k + 1) * segment.step_dt;
    if (u < total) {
      // u / total is uniform on [0, 1) given a jump; pick the channel with it.
      double acc = 0.0;
      const RankOneJump* chosen = &model.jumps.back();
      for (const auto& j : model.jumps) {
        acc += j.rate * std::norm(traj.psi(j.source)) * segment.step_dt;
        if (u < acc) {
          chosen = &j;
          break;
        }
      }
      traj.psi.setZero();
      traj.psi(chosen->target) = 1.0;
      traj.jumps.push_back({t_next, chosen->channel});
      if (is_detectable(chosen->channel)) traj.post_selected = false;
    } else {
      traj.psi = segment.propagator * traj.psi;
      traj.psi.normalize();
    }
  }
  traj.time = start + segment.duration;
}

State embed(const qubit::QubitState& psi) {
  State s = State::Zero();
  s.head<2>() = psi.amplitudes();
  return s;
}

double down_probability(const State& psi, Basis basis) {
  Eigen::Vector2cd v = psi.head<2>();
  if (basis == Basis::kX) {
    // exp(i pi/4 sigma_y) maps |+> -> |up> and |-> -> |down>.
    Operator2 r;
    r << 1.0, 1.0, -1.0, 1.0;
    v = (r * v / std::numbers::sqrt2).eval();
  }
  const double w = v.squaredNorm();
  if (!(w > 0.0)) throw PostSelectionUnderflow("read-out: empty qubit manifold");
  return std::norm(v(1)) / w;
}

bool read_out(const State& psi, Basis basis, Rng& rng) {
  return rng.uniform() < down_probability(psi, basis);
}

int measure_observable(const Operator2& observable, State& psi, Rng& rng) {
  const Eigen::Vector2cd v = psi.head<2>();
  const double w = v.squaredNorm();
  if (!(w > 0.0)) throw PostSelectionUnderflow("measure: empty qubit manifold");
  const Operator2 ident = Operator2::Identity();
  const Eigen::Vector2cd w_plus = 0.5 * (ident + observable) * v;
  const double p_plus = w_plus.squaredNorm() / w;
  const int outcome = rng.uniform() < p_plus ? 1 : -1;
  const Eigen::Vector2cd projected =
      outcome == 1 ? w_plus : Eigen::Vector2cd(0.5 * (ident - observable) * v);
  psi.setZero();
  psi.head<2>() = projected.normalized();
  return outcome;
}

TrajectoryRecord run_trajectory(const JumpModel& model, const State& psi0, double t_final,
                                double dt, std::uint64_t seed) {
  const Segment segment = make_segment(model, t_final, dt);
  LiveTrajectory tr(psi0.normalized(), seed);
  advance(model, segment, tr);
  TrajectoryRecord rec;
  rec.seed = seed;
  rec.jumps = std::move(tr.jumps);
  rec.post_selected = tr.post_selected;
  rec.final_state = tr.psi;
  return rec;
}

TrajectoryRecord run_trajectory(const JumpModel& model, const qubit::QubitState& psi0,
                                double t_final, double dt, std::uint64_t seed) {
  return run_trajectory(model, embed(psi0), t_final, dt, seed);
}

BinomialEstimate binomial(std::size_t successes, std::size_t trials) {
  BinomialEstimate b;
  b.successes = successes;
  b.trials = trials;
  if (trials == 0) return b;
  const double n = static_cast<double>(trials);
  b.value = static_cast<double>(successes) / n;
  b.error = std::sqrt(b.value * (1.0 - b.value) / n);
  return b;
}

EnsembleEstimate estimate(const JumpModel& model, const qubit::QubitState& psi0, Basis basis,
                          double t, std::size_t n_shots, std::uint64_t seed,
                          const EnsembleOptions& options) {
  require_shots(n_shots);
  const auto codes = readout_codes(model, embed(psi0), basis, t, n_shots, seed, 0, options);
  EnsembleEstimate out = summarize(codes, basis);
  if (out.n_selected == 0) {
    throw EmptyEnsembleError("estimate: no shot survived post-selection", 0.0);
  }
  return out;
}

std::vector<EnsembleEstimate> estimate_series(const JumpModel& model,
                                              const qubit::QubitState& psi0, Basis basis,
                                              std::span<const double> grid, std::size_t n_shots,
                                              std::uint64_t seed, const EnsembleOptions& options) {
  require_shots(n_shots);
  std::vector<EnsembleEstimate> out;
  out.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto codes = readout_codes(model, embed(psi0), basis, grid[k], n_shots, seed, k, options);
    out.push_back(summarize(codes, basis));
  }
  return out;
}

PopulationAverage unconditioned_populations(const JumpModel& model, const qubit::QubitState& psi0,
                                            double t, std::size_t n_shots, std::uint64_t seed,
                                            const EnsembleOptions& options) {
  require_shots(n_shots);
  const Segment segment = make_segment(model, t, resolve_dt(model, options));
  const State start = embed(psi0);
  std::vector<Eigen::Vector4d> pops(n_shots);
  numerics::parallel_for(n_shots, resolve_workers(options), [&](std::size_t i) {
    LiveTrajectory tr(start, derive_seed(seed, 0, i));
    advance(model, segment, tr);
    pops[i] = tr.psi.cwiseAbs2();
  });
  PopulationAverage out;
  for (const auto& p : pops) out.mean += p;
  const double n = static_cast<double>(n_shots);
  out.mean /= n;
  if (n_shots > 1) {
    Eigen::Vector4d var = Eigen::Vector4d::Zero();
    for (const auto& p : pops) var += (p - out.mean).cwiseAbs2();
    out.error = (var / (n - 1.0) / n).cwiseSqrt();
  }
  return out;
}

std::vector<PairedDeviation> backflow_deviation(const JumpModel& model,
                                                const qubit::QubitState& psi0,
                                                std::span<const double> grid,
                                                std::size_t n_shots, std::uint64_t seed,
                                                const EnsembleOptions& options) {
  require_shots(n_shots);
  const JumpModel twin = backflow_as_loss(model);
  const State start = embed(psi0);
  const double dt = resolve_dt(model, options);
  struct Pair {
    std::uint8_t with;
    std::uint8_t without;
  };

  std::vector<PairedDeviation> out;
  out.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Segment segment = make_segment(model, grid[k], dt);
    std::vector<Pair> pairs(n_shots);
    numerics::parallel_for(n_shots, resolve_workers(options), [&](std::size_t i) {
      const std::uint64_t s = derive_seed(seed, k, i);
      pairs[i] = {run_readout_shot(model, segment, start, Basis::kZ, s),
                  run_readout_shot(twin, segment, start, Basis::kZ, s)};
    });

    PairedDeviation d;
    d.t = grid[k];
    double down_with = 0.0;
    double down_without = 0.0;
    for (const auto& p : pairs) {
      d.n_with += p.with != kRejected;
      d.n_without += p.without != kRejected;
      down_with += p.with == kSelectedDown;
      down_without += p.without == kSelectedDown;
    }
    if (d.n_with == 0 || d.n_without == 0) {
      throw EmptyEnsembleError("backflow_deviation: no surviving shot at t = " +
                                   std::to_string(grid[k]),
                               0.0);
    }
    const double n = static_cast<double>(n_shots);
    d.p_with = down_with / static_cast<double>(d.n_with);
    d.p_without = down_without / static_cast<double>(d.n_without);
    d.deviation = d.p_with - d.p_without;
    const double f_with = static_cast<double>(d.n_with) / n;
    const double f_without = static_cast<double>(d.n_without) / n;

    // Linearized influence of each shot on the difference of the two ratios.
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& p : pairs) {
      double z = 0.0;
      if (p.with != kRejected) z += ((p.with == kSelectedDown) - d.p_with) / f_with;
      if (p.without != kRejected) z -= ((p.without == kSelectedDown) - d.p_without) / f_without;
      sum += z;
      sum_sq += z * z;
    }
    const double mean = sum / n;
    const double var = n > 1 ? (sum_sq - n * mean * mean) / (n - 1.0) : 0.0;
    d.error = std::sqrt(std::max(var, 0.0) / n);
    out.push_back(d);
  }
  return out;
}

std::vector<PairedDeviation> backflow_deviation(const open::IonParams& ion,
                                                std::span<const double> grid,
                                                std::size_t n_shots, std::uint64_t seed,
                                                const EnsembleOptions& options) {
  return backflow_deviation(eliminated_model(ion), qubit::QubitState::up(), grid, n_shots, seed,
                            options);
}

}  // namespace nhq::traj
