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


// nhqubit <experiment> [options]: runs one named experiment and writes a data
// file plus a JSON manifest next to it.

#include "harness/config.hpp"
#include "harness/experiments.hpp"

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

namespace h = nhq::harness;

int main(int argc, char** argv) {
  CLI::App app{"Post-selected non-Hermitian qubit simulations", "nhqubit"};
  app.set_version_flag("--version", std::string(h::kArtifactVersion));

  std::string experiment;
  std::optional<std::string> gamma_list;
  std::optional<std::string> jt_grid;
  std::optional<std::uint64_t> shots;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> config_file;
  std::optional<double> J;
  std::optional<double> probe_jt;
  std::optional<std::string> initial;
  std::optional<double> width_ratio;
  std::optional<std::string> width_ratios;
  std::optional<std::string> model;
  std::optional<int> resolution;
  bool no_backflow = false;
  unsigned workers = 0;

  std::string names;
  for (const auto& n : h::experiment_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("experiment", experiment, "One of: " + names);
  app.add_option("--gamma-over-j", gamma_list, "gamma/J values, e.g. 0.18,0.73 or 0:2:0.05");
  app.add_option("--jt-grid", jt_grid, "Jt grid lo:hi:step (pi allowed, e.g. 0:pi:0.01pi)");
  app.add_option("--shots", shots, "Trajectories per ensemble");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out, "Data file path");
  app.add_option("--format", format, "csv or json");
  app.add_option("--config", config_file, "JSON config or manifest");
  app.add_option("--J", J, "Drive J (rates scale with it)");
  app.add_option("--probe-jt", probe_jt, "Jt for the phase diagnostic");
  app.add_option("--initial-state", initial, "up, down, plus or minus");
  app.add_option("--width-ratio", width_ratio, "gamma_g / J_A for ion models");
  app.add_option("--width-ratios", width_ratios, "gamma_g / J_A sweep for lindblad-compare");
  app.add_option("--model", model, "eliminated, full or effective");
  app.add_option("--resolution", resolution, "Angular grid points for k3-optimize");
  app.add_flag("--no-backflow", no_backflow, "Drop backflow channels from ion models");
  app.add_option("--workers", workers, "Worker threads (0 = all cores); output is unaffected");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return h::kExitInvalidConfig;
  }

  h::RunConfig c;
  try {
    if (config_file) {
      c = h::load_config_file(*config_file);
      if (!experiment.empty()) {
        const h::Experiment e = h::parse_experiment(experiment);
        if (e != c.experiment) {
          c = h::apply_json(h::defaults_for(e), h::to_json(c));
          c.experiment = e;
        }
      }
    } else {
      if (experiment.empty()) throw h::ConfigError("missing experiment name");
      c = h::defaults_for(h::parse_experiment(experiment));
    }
    if (gamma_list) c.gamma_over_j = h::parse_value_list(*gamma_list);
    if (jt_grid) c.jt_grid = h::parse_grid(*jt_grid);
    if (shots) c.shots = *shots;
    if (seed) c.seed = *seed;
    if (out) c.out = *out;
    if (format) c.format = h::parse_format(*format);
    if (J) c.J = *J;
    if (probe_jt) c.probe_jt = *probe_jt;
    if (initial) c.initial_state = *initial;
    if (width_ratio) c.width_ratio = *width_ratio;
    if (width_ratios) c.width_ratios = h::parse_value_list(*width_ratios);
    if (model) c.model = *model;
    if (resolution) c.resolution = *resolution;
    if (no_backflow) c.backflow = false;
    c.workers = workers;
  } catch (const h::ConfigError& e) {
    std::cerr << "nhqubit: invalid config: " << e.what() << '\n';
    return h::kExitInvalidConfig;
  }
  return h::run(c, std::cerr);
}
