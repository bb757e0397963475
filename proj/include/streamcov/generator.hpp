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

#ifndef STREAMCOV_GENERATOR_HPP_
#define STREAMCOV_GENERATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "streamcov/core_model.hpp"
#include "streamcov/stream_io.hpp"

namespace streamcov {

enum class ProfileKind { Disjoint, Overlapping, PlantedOpt, AdversarialLadder };

std::string to_string(ProfileKind kind);
// "disjoint", "overlapping", "planted", "ladder". Throws InvalidProfile.
ProfileKind parse_profile_kind(const std::string& name);

struct GeneratorProfile {
  ProfileKind kind = ProfileKind::Overlapping;
  Element universe = 0;   // n; PlantedOpt uses `cover` when 0
  std::size_t num_sets = 0;
  std::size_t budget = 1;
  double density = 0.2;   // Overlapping
  std::size_t cover = 0;  // PlantedOpt
  double churn = 0.0;     // deleted fraction of the generated sets
  std::uint64_t seed = 0;
};

struct GeneratedData {
  Instance instance;                 // the live sets
  std::vector<StreamToken> stream;   // inserts, interleaved with deletes under churn
  std::optional<Certificate> certificate;
};

// Set ids are 0..m-1 in a seeded order. Deleted sets are never part of the
// certificate. Throws InvalidProfile.
GeneratedData generate(const GeneratorProfile& profile);

}  // namespace streamcov

#endif  // STREAMCOV_GENERATOR_HPP_
