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

#include "nhq/open_system.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace nhq::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment {
  kPhaseDiagram,
  kDeltaFit,
  kPDownSeries,
  kK3Scan,
  kK3Optimize,
  kK3MonteCarlo,
  kTransit,
  kLindbladCompare,
  kTrajectories,
};

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);
const std::vector<std::string>& experiment_names();

enum class Format { kCsv, kJson };

std::string_view to_string(Format f);
Format parse_format(std::string_view name);

/// Inclusive range lo, lo + step, ... up to hi (within 1e-9 step).
struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  std::vector<double> values() const;
};

/// "lo:hi:step"; numbers may be written as pi, 2pi, 0.5pi.
Grid parse_grid(std::string_view text);

/// Comma-separated values and lo:hi:step ranges, e.g. "0.18,0.37,1:2:0.5".
std::vector<double> parse_value_list(std::string_view text);

double parse_number(std::string_view token);

struct RunConfig {
  Experiment experiment = Experiment::kK3Scan;
  double J = 1.0;
  std::vector<double> gamma_over_j;
  Grid jt_grid;
  std::uint64_t shots = 0;
  std::uint64_t seed = 1;
  std::string out;
  Format format = Format::kCsv;

  double probe_jt = 0.1;
  std::string initial_state = "up";  // up, down, plus, minus
  double width_ratio = 100.0;        // gamma_g / J_A
  std::vector<double> width_ratios;  // lindblad-compare sweep
  bool backflow = true;
  int resolution = 64;
  std::string model = "eliminated";  // eliminated, full, effective
  open::Branching branching;
  double dt_over_default = 1.0;

  // Not part of the resolved parameters: never changes the output bytes.
  unsigned workers = 0;

  void validate() const;
};

/// Experiment-specific defaults for every field the caller left unset.
RunConfig defaults_for(Experiment e);

/// Overlays keys of `j` on `base`. A manifest is accepted too: its
/// resolved_params object is used. Unknown keys and bad types throw ConfigError.
RunConfig apply_json(const RunConfig& base, const nlohmann::json& j);

RunConfig load_config_file(const std::string& path);

nlohmann::json to_json(const RunConfig& c);

qubit::QubitState initial_state(const RunConfig& c);

}  // namespace nhq::harness
