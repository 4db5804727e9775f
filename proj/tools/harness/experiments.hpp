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

#include "config.hpp"
#include "table.hpp"

#include <ostream>
#include <string>

namespace nhq::harness {

inline constexpr const char* kArtifactVersion = "0.3.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidConfig = 1,
  kExitUnwritable = 2,
  kExitUnderflow = 3,
  kExitInternal = 4,
};

/// Computes the data table of an experiment. The rows depend only on the
/// resolved parameters, not on c.workers.
Table run_experiment(const RunConfig& c);

/// Path of the manifest written next to a data file.
std::string manifest_path(const std::string& data_file);

/// Default data file name when c.out is empty.
std::string default_output(const RunConfig& c);

nlohmann::json make_manifest(const RunConfig& c, const Table& t, const std::string& data_file);

/// Validates, runs, and writes data and manifest. Returns an ExitCode;
/// diagnostics go to `err`.
int run(const RunConfig& c, std::ostream& err);

}  // namespace nhq::harness
