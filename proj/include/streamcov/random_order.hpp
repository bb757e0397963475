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

#ifndef STREAMCOV_RANDOM_ORDER_HPP_
#define STREAMCOV_RANDOM_ORDER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <unordered_set>
#include <vector>

#include "streamcov/core_model.hpp"
#include "streamcov/ledger.hpp"

namespace streamcov {

struct RandomOrderConfig {
  std::size_t budget = 1;  // k
  double epsilon = 0.2;
  std::size_t alpha = 2;
  std::size_t beta = 2;
  std::uint64_t guess = 1;  // v, stands in for opt in the reserve threshold
  std::uint64_t seed = 0;
  bool debug_ledger = false;

  // ceil(4096 eps^-4 log(2/eps)) and ceil(32 eps^-2).
  static std::size_t formal_alpha(double epsilon);
  static std::size_t formal_beta(double epsilon);

  // alpha and beta at least the formal constants, k >= alpha beta and
  // alpha >= 4 beta^2 log(beta / 8).
  bool formal_regime() const;
  std::size_t windows() const;        // ceil(k / alpha)
  std::size_t total_groups() const;   // k beta
  // Stored-element cap with opt replaced by 2v:
  // 2v + alpha B 2v + (k/alpha) B 2v/k, B = max_{j <= alpha} C(alpha beta, j).
  double storage_cap() const;
};

struct GroupBoundaries {
  std::vector<std::size_t> counts;  // |C_1|, ..., |C_{k beta}|
};

// Labels each of m sets uniformly in {1..k beta} and counts the labels.
GroupBoundaries assign_groups(std::size_t num_sets, std::size_t budget, std::size_t beta,
                              std::uint64_t seed);

struct ReserveEntry {
  SetId id{};
  std::shared_ptr<const StoredElements> residual;  // S \ C, trimmed as C grows
};

// Solution, reserve and accounting carried across windows. Holds the ledger
// its stored element lists are charged to, so it is pinned in memory.
class RandomOrderState {
 public:
  RandomOrderState(Element universe, std::size_t budget, std::uint64_t guess);
  RandomOrderState(const RandomOrderState&) = delete;
  RandomOrderState& operator=(const RandomOrderState&) = delete;

  const CoverageState& solution() const { return solution_; }
  std::size_t budget() const { return budget_; }
  std::size_t budget_used() const { return solution_.budget_used(); }
  std::uint64_t guess() const { return guess_; }
  std::span<const ReserveEntry> reserve() const { return reserve_; }
  bool chosen(SetId id) const { return chosen_.contains(id); }

  MetricsLedger& ledger() { return ledger_; }
  const MetricsLedger& ledger() const { return ledger_; }

  // Adds a set to Y and its elements to C.
  void choose(SetId id, std::span<const Element> elements);
  // Inserts S \ C for a set that is neither chosen nor already reserved.
  // Returns false when nothing was inserted.
  bool reserve_set(SetId id, std::span<const Element> elements);
  bool reserved(SetId id) const { return reserved_.contains(id); }
  void clear_reserve();
  // Shrinks every reserve residual to S \ C, dropping empty and chosen entries.
  void trim_reserve();
  // Removes and returns the reserve entry at `index`.
  ReserveEntry take_reserve(std::size_t index);

  std::size_t reserve_elements() const;
  std::size_t max_residual_at_insert() const { return max_residual_at_insert_; }
  // Recount of everything this state holds: |C| + reserve residuals.
  std::size_t recount_state() const;

 private:
  MetricsLedger ledger_;
  CoverageState solution_;
  std::size_t budget_;
  std::uint64_t guess_;
  std::unordered_set<SetId> chosen_;
  std::vector<ReserveEntry> reserve_;
  std::unordered_set<SetId> reserved_;
  std::size_t max_residual_at_insert_ = 0;
};

// One step of a greedy sequence. A null pick (no id) means no candidate
// added anything.
struct GreedyPick {
  std::optional<SetId> id;
  std::size_t gain = 0;
  friend bool operator==(const GreedyPick&, const GreedyPick&) = default;
};

// sigma_I(C, R): step j takes the candidate in reserve + groups[j] with the
// largest |S \ (C + earlier picks)|, ties to the smallest id. Candidates in
// `excluded` (the current solution) are skipped.
std::vector<GreedyPick> greedy_sequence(const ElementSet& covered, std::span<const SetRecord> reserve,
                                        std::span<const std::vector<SetRecord>> groups,
                                        const std::unordered_set<SetId>& excluded = {});

struct WindowOutcome {
  std::size_t k_plus = 0;
  std::vector<std::size_t> best_subset;  // I*, 0-based positions in the window
  std::vector<GreedyPick> best_sequence;
  std::size_t best_score = 0;            // |C + union of sigma_{I*}|
  std::size_t subsets_scored = 0;
  std::size_t added_to_reserve = 0;
};

// Scores every k+-subset of the window's groups as sets stream in. Only the
// current best candidate and the picks of each subset's greedy sequence are
// retained, as residuals against C.
class WindowProcessor {
 public:
  WindowProcessor(RandomOrderState& state, std::size_t groups_in_window, std::size_t k_plus);
  ~WindowProcessor();
  WindowProcessor(const WindowProcessor&) = delete;
  WindowProcessor& operator=(const WindowProcessor&) = delete;

  void begin_group(std::size_t position);
  void offer(const SetRecord& set);
  void end_group();
  // Commits sigma_{I*} into the solution and every sequence's picks into
  // the reserve.
  WindowOutcome finish();

  // Distinct retained residual elements held by the processor.
  std::size_t retained_elements() const;

 private:
  struct Builder;
  RandomOrderState& state_;
  std::size_t k_plus_;
  std::size_t current_ = 0;
  std::vector<Builder> builders_;
  std::vector<std::vector<std::size_t>> builders_by_group_;
};

// Buffered form: feeds `window_groups` to a WindowProcessor.
WindowOutcome process_window(RandomOrderState& state, std::span<const std::vector<SetRecord>> window_groups);

// While the budget allows, adds a uniformly random reserve set with
// |S \ C| >= v/k. Returns the ids added, in order.
std::vector<SetId> drain_reserve(RandomOrderState& state, std::mt19937_64& rng);

// Snapshot handed to an observer after each processed window, for auditing.
struct WindowAudit {
  std::size_t window = 0;
  std::size_t k_plus = 0;
  ElementSet covered_before;
  std::unordered_set<SetId> chosen_before;
  std::vector<SetRecord> reserve_before;         // id + residual
  std::vector<std::vector<SetRecord>> groups;    // sets as they arrived
  WindowOutcome outcome;
  std::vector<SetId> drained;
};

struct RandomOrderResult {
  CoverageState solution;
  MetricsLedger ledger;
  std::size_t sets_read = 0;
  std::size_t windows_processed = 0;
  std::size_t reserve_size = 0;
  bool formal_regime = false;
};

// Single pass over `stream` (already in random order).
RandomOrderResult run_random_order(std::span<const SetRecord> stream, Element universe,
                                   const RandomOrderConfig& config,
                                   const std::function<void(const WindowAudit&)>& observer = {});

}  // namespace streamcov

#endif  // STREAMCOV_RANDOM_ORDER_HPP_
