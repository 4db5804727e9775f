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


#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace nhq::harness {

namespace {

using nlohmann::json;

struct ExperimentName {
  Experiment e;
  const char* name;
};

constexpr ExperimentName kExperiments[] = {
    {Experiment::kPhaseDiagram, "phase-diagram"},
    {Experiment::kDeltaFit, "delta-fit"},
    {Experiment::kPDownSeries, "p-down-series"},
    {Experiment::kK3Scan, "k3-scan"},
    {Experiment::kK3Optimize, "k3-optimize"},
    {Experiment::kK3MonteCarlo, "k3-montecarlo"},
    {Experiment::kTransit, "transit"},
    {Experiment::kLindbladCompare, "lindblad-compare"},
    {Experiment::kTrajectories, "trajectories"},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

double get_number(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return parse_number(j.get<std::string>());
    } catch (const ConfigError& e) {
      field_error(field, e.what());
    }
  }
  field_error(field, "expected a number");
}

std::uint64_t get_count(const json& j, const std::string& field) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) field_error(field, "must be non-negative");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  field_error(field, "expected a non-negative integer");
}

std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) field_error(field, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_list(const json& j, const std::string& field) {
  if (j.is_string()) {
    try {
      return parse_value_list(j.get<std::string>());
    } catch (const ConfigError& e) {
      field_error(field, e.what());
    }
  }
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) field_error(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Grid get_grid(const json& j, const std::string& field) {
  if (j.is_string()) {
    try {
      return parse_grid(j.get<std::string>());
    } catch (const ConfigError& e) {
      field_error(field, e.what());
    }
  }
  if (!j.is_object()) field_error(field, "expected \"lo:hi:step\" or {lo, hi, step}");
  Grid g;
  for (const auto& [key, value] : j.items()) {
    if (key == "lo") {
      g.lo = get_number(value, field + ".lo");
    } else if (key == "hi") {
      g.hi = get_number(value, field + ".hi");
    } else if (key == "step") {
      g.step = get_number(value, field + ".step");
    } else if (key != "count") {
      field_error(field + "." + key, "unknown key");
    }
  }
  return g;
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) field_error(field, what);
}

bool needs_shots(Experiment e) {
  return e == Experiment::kK3MonteCarlo || e == Experiment::kTrajectories;
}

}  // namespace

std::string_view to_string(Experiment e) {
  for (const auto& x : kExperiments) {
    if (x.e == e) return x.name;
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view name) {
  for (const auto& x : kExperiments) {
    if (name == x.name) return x.e;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& x : kExperiments) v.emplace_back(x.name);
    return v;
  }();
  return names;
}

std::string_view to_string(Format f) { return f == Format::kCsv ? "csv" : "json"; }

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::kCsv;
  if (name == "json") return Format::kJson;
  throw ConfigError("unknown format '" + std::string(name) + "' (expected csv or json)");
}

double parse_number(std::string_view token) {
  std::string s = trim(token);
  double scale = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    s.resize(s.size() - 2);
    if (!s.empty() && s.back() == '*') s.pop_back();
    if (s.empty()) return scale;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("cannot parse number '" + std::string(token) + "'");
  }
  return v * scale;
}

Grid parse_grid(std::string_view text) {
  std::vector<std::string> parts;
  std::string s(text);
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() == 1) {
    const double v = parse_number(parts[0]);
    return {v, v, 1.0};
  }
  if (parts.size() != 3) {
    throw ConfigError("grid '" + s + "' must have the form lo:hi:step");
  }
  return {parse_number(parts[0]), parse_number(parts[1]), parse_number(parts[2])};
}

std::vector<double> parse_value_list(std::string_view text) {
  std::vector<double> out;
  std::stringstream ss{std::string(text)};
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.find(':') != std::string::npos) {
      const Grid g = parse_grid(item);
      if (!(g.step > 0.0) || g.hi < g.lo) {
        throw ConfigError("range '" + trim(item) + "' needs step > 0 and hi >= lo");
      }
      for (double v : g.values()) out.push_back(v);
    } else {
      out.push_back(parse_number(item));
    }
  }
  if (out.empty()) throw ConfigError("empty value list");
  return out;
}

std::vector<double> Grid::values() const {
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + static_cast<double>(i) * step;
  return v;
}

void RunConfig::validate() const {
  require(std::isfinite(J) && J > 0.0, "J", "must be a positive number");
  require(!gamma_over_j.empty(), "gamma_over_j", "must list at least one value");
  for (std::size_t i = 0; i < gamma_over_j.size(); ++i) {
    require(std::isfinite(gamma_over_j[i]) && gamma_over_j[i] >= 0.0,
            "gamma_over_j[" + std::to_string(i) + "]", "must be finite and >= 0");
  }
  require(std::isfinite(jt_grid.lo) && jt_grid.lo >= 0.0, "jt_grid.lo", "must be >= 0");
  require(std::isfinite(jt_grid.hi) && jt_grid.hi >= jt_grid.lo, "jt_grid.hi", "must be >= lo");
  require(std::isfinite(jt_grid.step) && jt_grid.step > 0.0, "jt_grid.step", "must be > 0");
  require((jt_grid.hi - jt_grid.lo) / jt_grid.step < 1e7, "jt_grid", "more than 1e7 points");
  if (needs_shots(experiment)) require(shots > 0, "shots", "must be > 0");
  require(std::isfinite(probe_jt) && probe_jt > 0.0, "probe_jt", "must be > 0");
  require(initial_state == "up" || initial_state == "down" || initial_state == "plus" ||
              initial_state == "minus",
          "initial_state", "must be one of up, down, plus, minus");
  require(std::isfinite(width_ratio) && width_ratio >= 1.0, "width_ratio", "must be >= 1");
  for (std::size_t i = 0; i < width_ratios.size(); ++i) {
    require(std::isfinite(width_ratios[i]) && width_ratios[i] >= 10.0,
            "width_ratios[" + std::to_string(i) + "]", "must be >= 10");
  }
  if (experiment == Experiment::kLindbladCompare) {
    require(!width_ratios.empty(), "width_ratios", "must list at least one value");
  }
  require(resolution >= 32, "resolution", "must be >= 32");
  require(model == "eliminated" || model == "full" || model == "effective", "model",
          "must be one of eliminated, full, effective");
  try {
    branching.validate();
  } catch (const std::invalid_argument& e) {
    field_error("branching", e.what());
  }
  require(dt_over_default > 0.0 && dt_over_default <= 1.0, "dt_over_default",
          "must lie in (0, 1]");
}

RunConfig defaults_for(Experiment e) {
  RunConfig c;
  c.experiment = e;
  c.jt_grid = {0.0, 1.5, 0.01};
  switch (e) {
    case Experiment::kPhaseDiagram:
      c.gamma_over_j = parse_value_list("0:2:0.05");
      c.jt_grid = {0.1, 0.1, 1.0};
      break;
    case Experiment::kDeltaFit:
      c.gamma_over_j = {0.5, 1.5};
      c.jt_grid = {0.02, 0.1, 0.02};
      break;
    case Experiment::kPDownSeries:
      c.gamma_over_j = {0.18, 0.73};
      c.jt_grid = {0.0, 5.0, 0.05};
      break;
    case Experiment::kK3Scan:
      c.gamma_over_j = {0.18, 0.37, 0.73, 0.88, 1.0, 1.56, 2.0};
      c.initial_state = "down";
      break;
    case Experiment::kK3Optimize:
      c.gamma_over_j = {2.0};
      c.jt_grid = {0.05, 1.5, 0.05};
      c.initial_state = "down";
      break;
    case Experiment::kK3MonteCarlo:
      c.gamma_over_j = {0.88};
      c.jt_grid = {0.2, 0.6, 0.1};
      c.shots = 10000;
      c.initial_state = "down";
      c.backflow = false;
      break;
    case Experiment::kTransit:
      c.gamma_over_j = parse_value_list("0:2:0.02");
      c.jt_grid = {0.0, 0.0, 1.0};
      break;
    case Experiment::kLindbladCompare:
      c.gamma_over_j = {0.37};
      c.jt_grid = parse_grid("0:pi:0.01pi");
      c.width_ratios = {10.0, 30.0, 100.0};
      c.backflow = false;
      break;
    case Experiment::kTrajectories:
      c.gamma_over_j = {0.18, 0.73};
      c.jt_grid = {0.0, 5.0, 0.5};
      c.shots = 20000;
      break;
  }
  return c;
}

RunConfig apply_json(const RunConfig& base, const json& input) {
  const json& j = input.contains("resolved_params") ? input.at("resolved_params") : input;
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  RunConfig c = base;
  for (const auto& [key, v] : j.items()) {
    if (key == "experiment") {
      c.experiment = parse_experiment(get_string(v, key));
    } else if (key == "J") {
      c.J = get_number(v, key);
    } else if (key == "gamma_over_j") {
      c.gamma_over_j = get_list(v, key);
    } else if (key == "jt_grid") {
      c.jt_grid = get_grid(v, key);
    } else if (key == "shots") {
      c.shots = get_count(v, key);
    } else if (key == "seed") {
      c.seed = get_count(v, key);
    } else if (key == "out") {
      c.out = get_string(v, key);
    } else if (key == "format") {
      try {
        c.format = parse_format(get_string(v, key));
      } catch (const ConfigError& e) {
        field_error(key, e.what());
      }
    } else if (key == "probe_jt") {
      c.probe_jt = get_number(v, key);
    } else if (key == "initial_state") {
      c.initial_state = get_string(v, key);
    } else if (key == "width_ratio") {
      c.width_ratio = get_number(v, key);
    } else if (key == "width_ratios") {
      c.width_ratios = get_list(v, key);
    } else if (key == "backflow") {
      if (!v.is_boolean()) field_error(key, "expected true or false");
      c.backflow = v.get<bool>();
    } else if (key == "resolution") {
      const auto r = get_count(v, key);
      if (r > 4096) field_error(key, "must be <= 4096");
      c.resolution = static_cast<int>(r);
    } else if (key == "model") {
      c.model = get_string(v, key);
    } else if (key == "dt_over_default") {
      c.dt_over_default = get_number(v, key);
    } else if (key == "branching") {
      if (!v.is_object()) field_error(key, "expected an object");
      for (const auto& [bk, bv] : v.items()) {
        const std::string f = "branching." + bk;
        if (bk == "ground") {
          c.branching.ground = get_number(bv, f);
        } else if (bk == "backflow") {
          c.branching.backflow = get_number(bv, f);
        } else if (bk == "d3") {
          c.branching.d3 = get_number(bv, f);
        } else if (bk == "up_share") {
          c.branching.up_share = get_number(bv, f);
        } else {
          field_error(f, "unknown key");
        }
      }
    } else {
      field_error(key, "unknown key");
    }
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  const json& body = j.contains("resolved_params") ? j.at("resolved_params") : j;
  if (!body.is_object() || !body.contains("experiment")) {
    throw ConfigError(path + ": missing field 'experiment'");
  }
  const Experiment e = parse_experiment(get_string(body.at("experiment"), "experiment"));
  return apply_json(defaults_for(e), j);
}

json to_json(const RunConfig& c) {
  json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["J"] = c.J;
  j["gamma_over_j"] = c.gamma_over_j;
  j["jt_grid"] = {{"lo", c.jt_grid.lo}, {"hi", c.jt_grid.hi}, {"step", c.jt_grid.step}};
  j["shots"] = c.shots;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["format"] = std::string(to_string(c.format));
  j["probe_jt"] = c.probe_jt;
  j["initial_state"] = c.initial_state;
  j["width_ratio"] = c.width_ratio;
  j["width_ratios"] = c.width_ratios;
  j["backflow"] = c.backflow;
  j["resolution"] = c.resolution;
  j["model"] = c.model;
  j["dt_over_default"] = c.dt_over_default;
  j["branching"] = {{"ground", c.branching.ground},
                    {"backflow", c.branching.backflow},
                    {"d3", c.branching.d3},
                    {"up_share", c.branching.up_share}};
  return j;
}

qubit::QubitState initial_state(const RunConfig& c) {
  if (c.initial_state == "up") return qubit::QubitState::up();
  if (c.initial_state == "plus") return qubit::QubitState::plus();
  if (c.initial_state == "minus") return qubit::QubitState::minus();
  return qubit::QubitState::down();
}

}  // namespace nhq::harness
