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

#ifndef STREAMCOV_DYNAMIC_MAXCOV_HPP_
#define STREAMCOV_DYNAMIC_MAXCOV_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "streamcov/core_model.hpp"
#include "streamcov/ledger.hpp"

namespace streamcov {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// Number of tail levels: 1 + ceil(log_{1+eps}(16 e)).
std::size_t tail_levels(double epsilon);

// 20 (1 + eps^-1 / log2 log2 max(m, 4)) log2 max(m, 4), rounded up.
std::size_t default_pass_cap(double epsilon, std::size_t num_sets);

struct DynamicConfig {
  std::size_t budget = 1;      // k
  double epsilon = 0.2;
  std::uint64_t guess = 1;     // v
  std::size_t pass_cap = 0;    // 0: default_pass_cap
  std::uint64_t seed = 0;
  double delta = 0.0;          // 0: default_delta(m)
  bool debug_ledger = false;

  // ell = floor(log2 k)
  std::size_t ell() const;
  // theta[i] = 2v / 2^i for i in 1..ell; theta[0] = +inf.
  std::vector<double> theta() const;
  // tau[i] = (2v / 2^ell) / (1+eps)^(i-1) for i in 1..tail_levels; tau[0] = +inf.
  std::vector<double> tau() const;
};

enum class GrowOutcome : std::uint8_t { Grew, Skipped, BudgetFull };

// Adds `id` when |residual \ C| >= threshold. `residual` may be any superset
// of S \ C that is a subset of S. The caller stops once |Y| reaches k.
GrowOutcome grow_solution(CoverageState& state, std::size_t budget, SetId id,
                          std::span<const Element> residual, double threshold,
                          MetricsLedger* ledger = nullptr);

enum class DynamicPhase : std::uint8_t { Cascade, Tail, Done };

struct IterationRecord {
  DynamicPhase phase = DynamicPhase::Cascade;
  std::size_t level = 0;               // tail level i; 0 for cascade
  std::size_t draws = 0;
  std::size_t distinct_retrieved = 0;
  std::size_t retrieved_elements = 0;  // sum of |S \ C| over retrieved sets
  std::size_t retrieved_bound = 0;     // 4 v ell (cascade) or k * tau_{i-1} (tail)
  std::size_t grew = 0;
  std::size_t band_violations = 0;     // retrieved sets outside their band
  std::size_t coverage_after = 0;
};

struct DynamicTrace {
  std::vector<IterationRecord> iterations;
  std::size_t cascade_iterations = 0;
  // tail_iterations[i] for i in 1..tail_levels; index 0 unused.
  std::vector<std::size_t> tail_iterations;
  std::size_t terminal_passes = 0;  // final pass that found every band empty
  std::size_t retry_passes = 0;
  std::size_t fallbacks = 0;
  bool guess_rejected = false;      // a live set had |S| > 2v, so v < opt/2
};

struct DynamicResult {
  std::uint64_t guess = 0;
  CoverageState solution;
  MetricsLedger ledger;
  DynamicTrace trace;
};

// Multi-pass dynamic-stream max coverage for one guess v. Throws
// PassCapExceeded or SketchFailure.
DynamicResult run_dynamic(ReplayableStream& stream, const DynamicConfig& config);

struct GuessLadderResult {
  DynamicResult best;
  std::vector<DynamicResult> runs;  // one per guess, ascending v
  MetricsLedger combined;           // passes shared, space summed
};

// v = 1, 2, 4, ..., 2^ceil(log2 n).
std::vector<std::uint64_t> guess_ladder(Element universe);

// One estimator per guess over the same passes; returns the best coverage.
GuessLadderResult run_with_guesses(ReplayableStream& stream, std::size_t budget, double epsilon,
                                   std::uint64_t seed, std::size_t pass_cap = 0,
                                   double delta = 0.0);

}  // namespace streamcov

#endif  // STREAMCOV_DYNAMIC_MAXCOV_HPP_
