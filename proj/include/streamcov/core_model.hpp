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

#ifndef STREAMCOV_CORE_MODEL_HPP_
#define STREAMCOV_CORE_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "streamcov/types.hpp"

namespace streamcov {

// A maximum-coverage instance: universe [1, n], a collection of sets, and a
// budget k. Immutable after construction.
class Instance {
 public:
  // Throws InvalidInstance on malformed sets, duplicate ids, ids outside
  // [0, m^3 n), or a budget outside [1, m].
  Instance(Element universe, std::size_t budget, std::vector<SetRecord> sets);

  Element universe_size() const { return universe_; }
  std::size_t num_sets() const { return sets_.size(); }
  std::size_t budget() const { return budget_; }
  std::span<const SetRecord> sets() const { return sets_; }

  bool contains(SetId id) const { return index_.contains(id); }
  // Throws UnknownId.
  const SetRecord& find(SetId id) const;

 private:
  Element universe_;
  std::size_t budget_;
  std::vector<SetRecord> sets_;
  std::unordered_map<SetId, std::size_t> index_;
};

// Checks the per-record invariants (strictly increasing, within [1, n]).
// Returns an empty string when valid, otherwise a description.
std::string describe_record_problem(const SetRecord& record, Element universe);

// The solution Y (chosen ids, in insertion order) and the covered set C.
struct CoverageState {
  std::vector<SetId> chosen;
  ElementSet covered;

  CoverageState() = default;
  explicit CoverageState(Element universe) : covered(universe) {}

  std::size_t budget_used() const { return chosen.size(); }
  std::size_t coverage() const { return covered.size(); }
  bool has_chosen(SetId id) const;
  // Adds the id to Y and the elements to C; returns the number of new elements.
  std::size_t add(SetId id, std::span<const Element> elements);
};

// |union of the sets named by ids|. Throws UnknownId.
std::size_t coverage(const Instance& instance, std::span<const SetId> ids);

// Recomputes C from the raw instance for the chosen ids.
ElementSet covered_elements(const Instance& instance, std::span<const SetId> ids);

struct OptResult {
  std::size_t value = 0;
  std::vector<SetId> witness;  // ascending ids
};

inline constexpr std::uint64_t kDefaultBruteForceCap = 2'000'000;

// Exact optimum by enumerating all k-subsets. Ties resolve to the
// lexicographically smallest ascending id tuple. Throws TooLarge when
// C(m, k) exceeds `cap`.
OptResult brute_force_opt(const Instance& instance, std::uint64_t cap = kDefaultBruteForceCap);

// Binomial coefficient saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t r);

// Classic greedy: up to k picks of the largest marginal gain, ties to the
// smallest id, stopping early once no set adds anything.
CoverageState offline_greedy(const Instance& instance);

// Strictly decreasing positive thresholds tau_1 > ... > tau_p.
class ThresholdLadder {
 public:
  explicit ThresholdLadder(std::vector<double> thresholds);

  // tau_i = tau_1 / (1+eps)^(i-1), tau_1 = 2v/k, stopping at the first tau_p
  // below v / (4 e k).
  static ThresholdLadder geometric(double guess, std::size_t budget, double epsilon);

  std::span<const double> thresholds() const { return tau_; }
  std::size_t size() const { return tau_.size(); }

  // tau_1 >= v_low/k, tau_p < v_low/(4 e k), consecutive ratios <= 1+eps.
  bool satisfies(double v_low, std::size_t budget, double epsilon) const;

 private:
  std::vector<double> tau_;
};

// Multi-pass threshold greedy over an insert-only stream.
CoverageState quantized_greedy(std::span<const SetRecord> stream, Element universe,
                               std::size_t budget, const ThresholdLadder& ladder);

// f_S(r) = prod_{u in S} (r - u) over F_p. Throws BadField when p is not
// prime or r >= p.
SetId assign_set_id(std::span<const Element> elements, std::uint64_t point, std::uint64_t prime);

// --- dynamic streams -------------------------------------------------------

enum class Op : std::uint8_t { Insert, Delete };

struct StreamToken {
  Op op = Op::Insert;
  // Deletes may carry the id only.
  SetRecord set;

  friend bool operator==(const StreamToken&, const StreamToken&) = default;
};

// Validates a token sequence: records well-formed, a delete never precedes a
// matching insert, re-inserts carry identical contents, and every id ends
// with net count 0 or 1. Throws ValidationError with the 1-based token index.
void validate_stream(std::span<const StreamToken> tokens, Element universe);

// The instance formed by the net-live sets of a valid stream.
Instance live_instance(std::span<const StreamToken> tokens, Element universe, std::size_t budget);

// Harness-side storage of a dynamic stream that can be replayed once per
// pass. Delete tokens are resolved to the contents of their insert so every
// token handed to an algorithm carries its element list. Algorithms never
// count this storage against their space.
class ReplayableStream {
 public:
  ReplayableStream(std::vector<StreamToken> tokens, Element universe);

  Element universe() const { return universe_; }
  std::size_t num_tokens() const { return tokens_.size(); }
  std::size_t distinct_ids() const { return distinct_ids_; }
  std::uint64_t max_id() const { return max_id_; }
  std::size_t passes() const { return passes_; }

  // Runs one pass; visit(const StreamToken&) is called in stream order.
  template <class Visitor>
  void replay(Visitor&& visit) {
    ++passes_;
    for (const StreamToken& token : tokens_) visit(token);
  }

  std::span<const StreamToken> tokens() const { return tokens_; }

 private:
  std::vector<StreamToken> tokens_;
  Element universe_;
  std::size_t distinct_ids_ = 0;
  std::uint64_t max_id_ = 0;
  std::size_t passes_ = 0;
};

}  // namespace streamcov

#endif  // STREAMCOV_CORE_MODEL_HPP_
