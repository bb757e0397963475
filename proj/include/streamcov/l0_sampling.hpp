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

#ifndef STREAMCOV_L0_SAMPLING_HPP_
#define STREAMCOV_L0_SAMPLING_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "streamcov/core_model.hpp"
#include "streamcov/hashing.hpp"

namespace streamcov {

// Failure probability default: 1 / (m log2 m), m clamped to at least 4.
double default_delta(std::size_t num_sets);

enum class SampleStatus : std::uint8_t { Sample, Empty, Fail };

struct L0Result {
  SampleStatus status = SampleStatus::Fail;
  SetId id{};
};

// Linear sketch over ids in [0, id_space) updated with +-1 tokens. Each
// repetition nests log2(M)+1 subsampling levels; level j admits an id when
// its level hash falls below p / 2^j. Every level keeps a 1-sparse recovery
// cell (count, id sum, fingerprint sum of z^id).
class L0Sketch {
 public:
  L0Sketch(std::uint64_t id_space, double delta, std::uint64_t seed);

  void update(SetId x, int delta);
  L0Result query() const;

  std::uint64_t id_space() const { return id_space_; }
  std::size_t levels() const { return levels_; }
  std::size_t repetitions() const { return reps_.size(); }
  std::size_t words() const;

  friend bool operator==(const L0Sketch&, const L0Sketch&) = default;

 private:
  struct Cell {
    std::int64_t count = 0;
    std::uint64_t id_sum = 0;
    std::uint64_t fingerprint = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
  };
  struct Repetition {
    HashPolynomial level_hash;
    std::uint64_t z;
    std::vector<Cell> cells;
    friend bool operator==(const Repetition&, const Repetition&) = default;
  };

  std::size_t level_of(const Repetition& rep, std::uint64_t x) const;

  std::uint64_t id_space_;
  std::size_t levels_;
  std::vector<Repetition> reps_;
};

L0Result l0_query(const L0Sketch& sketch);
void l0_update(L0Sketch& sketch, SetId x, int delta);

// Exact recovery of the live id set while it has at most `capacity` ids:
// three hashed tables of 1-sparse cells decoded by peeling.
class SparseRecovery {
 public:
  SparseRecovery(std::size_t capacity, std::uint64_t id_space, std::uint64_t seed);

  void update(SetId x, int delta);
  // Sorted live ids, or nullopt when the support is too large to peel.
  std::optional<std::vector<SetId>> decode() const;
  std::size_t words() const;

 private:
  struct Cell {
    std::int64_t count = 0;
    std::uint64_t id_sum = 0;
    std::uint64_t fingerprint = 0;
  };

  std::size_t slot(std::size_t table, std::uint64_t x) const;
  static void apply(Cell& cell, std::uint64_t x, int delta, std::uint64_t term);
  std::uint64_t term(std::uint64_t x) const;

  std::uint64_t id_space_;
  std::size_t width_;
  std::uint64_t z_;
  std::vector<HashPolynomial> hashes_;
  std::vector<Cell> cells_;  // table-major, 3 * width_
};

struct SamplerParams {
  std::uint64_t id_space = 1;
  double delta = 0.01;
  std::uint64_t seed = 0;
};

// With-replacement sampling of up to r live ids with polylog update cost:
// ids are split into t = ceil(r / L) groups by an O(L)-wise independent hash
// (L = ceil(log2 r)), each group owning 2L independent L0 sketches and an
// exact live count. A draw picks a group with probability rho_i / sum rho
// and consumes that group's next unused sketch.
class BatchSampler {
 public:
  BatchSampler(std::size_t r, const SamplerParams& params);

  void update(SetId x, int delta);

  // Throws EmptySupport when nothing is live, GroupExhausted when a group
  // runs out of sketches, invalid_argument when count > r.
  std::vector<SetId> draw(std::size_t count, std::mt19937_64& rng);
  // Like draw, but on GroupExhausted answers the whole request from the
  // sparse-recovery buffer (capacity 4r). Throws SketchFailure when that
  // cannot decode either.
  std::vector<SetId> draw_with_fallback(std::size_t count, std::mt19937_64& rng);

  std::size_t requested() const { return r_; }
  std::size_t num_groups() const { return groups_.size(); }
  std::size_t sketches_per_group() const { return 2 * log_r_; }
  std::int64_t live_count() const;
  std::vector<std::int64_t> group_live_counts() const;
  std::size_t group_of(SetId x) const;

  std::size_t tokens_seen() const { return tokens_; }
  std::size_t sketch_updates() const { return sketch_updates_; }
  std::size_t fallbacks() const { return fallbacks_; }
  std::size_t words() const;

 private:
  struct Group {
    std::vector<L0Sketch> sketches;
    std::size_t next_unused = 0;
    std::int64_t live = 0;
  };

  std::size_t r_;
  std::size_t log_r_;
  HashPolynomial partition_hash_;
  std::vector<Group> groups_;
  SparseRecovery recovery_;
  std::size_t tokens_ = 0;
  std::size_t sketch_updates_ = 0;
  std::size_t fallbacks_ = 0;
};

std::vector<SetId> batch_draw(BatchSampler& sampler, std::size_t count, std::mt19937_64& rng);

// One pass over the stream admitting exactly the tokens whose set has
// lo <= |S \ C| < hi.
BatchSampler restricted_sampler(ReplayableStream& stream, const ElementSet& covered, double lo,
                                double hi, std::size_t r, const SamplerParams& params);

}  // namespace streamcov

#endif  // STREAMCOV_L0_SAMPLING_HPP_
