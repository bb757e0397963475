// Copyright 2026 The streamcov Authors
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

#ifndef STREAMCOV_EXPERIMENT_HPP_
#define STREAMCOV_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "streamcov/urn_sim.hpp"

namespace streamcov {

struct ExperimentOutcome {
  std::size_t trials = 0;
  std::size_t failures = 0;  // trials whose invariant checks failed or threw
  std::vector<std::string> messages;

  bool ok() const { return failures == 0; }
};

// Runs the experiment described by a JSON document and writes one CSV row
// per trial. Relative paths resolve against `base_dir`. A present
// `seed_override` replaces the configured seed. Throws Error on a malformed
// config.
ExperimentOutcome run_experiment(const std::string& json_text, std::ostream& csv,
                                 const std::filesystem::path& base_dir = ".",
                                 std::optional<std::uint64_t> seed_override = std::nullopt);
ExperimentOutcome run_experiment_file(const std::filesystem::path& path, std::ostream& csv,
                                      std::optional<std::uint64_t> seed_override = std::nullopt);

// Column names of the per-trial metrics CSV, after the schema column.
const std::vector<std::string>& metrics_columns();
// Column names of the urn CSV, after the schema column.
const std::vector<std::string>& urn_columns();

void write_urn_trials(std::ostream& csv, const PhaseBoundReport& report);

// Short class name of a library error, e.g. "BudgetExceeded".
std::string error_kind(const std::exception& e);

// STREAMCOV_SEED, when set to an unsigned integer.
std::optional<std::uint64_t> seed_from_environment();

}  // namespace streamcov

#endif  // STREAMCOV_EXPERIMENT_HPP_
