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

#include <stdexcept>
#include <string>

namespace nhq {

/// Raised when the post-selected branch carries too little weight to be
/// renormalized (norm below 1e-150).
class PostSelectionUnderflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No shot survived post-selection. Carries the (zero) selected fraction so
/// callers can still report it.
class EmptyEnsembleError : public std::runtime_error {
 public:
  EmptyEnsembleError(const std::string& what, double fraction_selected)
      : std::runtime_error(what), fraction_selected_(fraction_selected) {}

  double fraction_selected() const noexcept { return fraction_selected_; }

 private:
  double fraction_selected_;
};

}  // namespace nhq
