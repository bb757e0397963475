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

#include "streamcov/dynamic_maxcov.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "streamcov/errors.hpp"
#include "streamcov/urn_sim.hpp"
#include "support.hpp"

namespace streamcov {
namespace {

using testing::inserts;
using testing::rec;

ReplayableStream stream_of(const Instance& instance) {
  return ReplayableStream(inserts(instance), instance.universe_size());
}

// Insert-only stream without the instance's id and budget checks.
ReplayableStream raw_stream(Element n, std::vector<SetRecord> sets) {
  std::vector<StreamToken> tokens;
  for (SetRecord& s : sets) tokens.push_back({Op::Insert, std::move(s)});
  return ReplayableStream(std::move(tokens), n);
}

DynamicConfig config(std::size_t k, std::uint64_t v, std::uint64_t seed = 1) {
  DynamicConfig cfg;
  cfg.budget = k;
  cfg.epsilon = 0.2;
  cfg.guess = v;
  cfg.seed = seed;
  return cfg;
}

std::size_t loop_iterations(const DynamicTrace& trace) {
  std::size_t total = trace.cascade_iterations;
  for (std::size_t t : trace.tail_iterations) total += t;
  return total;
}

TEST(DynamicConfigTest, LaddersMatchDefinitions) {
  const DynamicConfig cfg = config(4, 8);
  EXPECT_EQ(cfg.ell(), 2U);
  const std::vector<double> theta = cfg.theta();
  ASSERT_EQ(theta.size(), 3U);
  EXPECT_TRUE(std::isinf(theta[0]));
  EXPECT_EQ(theta[1], 8.0);
  EXPECT_EQ(theta[2], 4.0);

  const std::vector<double> tau = cfg.tau();
  // 1 + ceil(ln(16e) / ln 1.2) = 1 + ceil(20.69)
  EXPECT_EQ(tail_levels(0.2), 22U);
  ASSERT_EQ(tau.size(), 23U);
  EXPECT_EQ(tau[1], 4.0);
  for (std::size_t i = 2; i < tau.size(); ++i) EXPECT_LT(tau[i], tau[i - 1]);
  EXPECT_EQ(cfg.ell(), static_cast<std::size_t>(std::floor(std::log2(4.0))));
}

TEST(DynamicConfigTest, TauEndpointsBracketTheGuess) {
  for (std::size_t k : {1U, 2U, 3U, 5U, 8U, 13U, 64U, 100U}) {
    for (double eps : {0.05, 0.1, 0.2, 0.5, 0.9}) {
      DynamicConfig cfg = config(k, 37);
      cfg.epsilon = eps;
      const std::vector<double> tau = cfg.tau();
      const double v = 37.0;
      EXPECT_GT(tau[1], v / static_cast<double>(k)) << k << " " << eps;
      EXPECT_LT(tau.back(), v / (4.0 * std::numbers::e * static_cast<double>(k))) << k << " " << eps;
      const std::vector<double> theta = cfg.theta();
      for (std::size_t i = 2; i < theta.size(); ++i) EXPECT_EQ(theta[i] * 2.0, theta[i - 1]);
    }
  }
}

TEST(DynamicConfigTest, DefaultPassCap) {
  // m = 1024: 20 * (1 + 5 / log2(10)) * 10
  EXPECT_EQ(default_pass_cap(0.2, 1024), static_cast<std::size_t>(std::ceil(200.0 * (1.0 + 5.0 / std::log2(10.0)))));
  EXPECT_EQ(default_pass_cap(0.2, 1), default_pass_cap(0.2, 4));
}

TEST(GrowSolutionTest, BoundaryIsInclusive) {
  CoverageState state(10);
  const std::vector<Element> s{1, 2, 3};
  EXPECT_EQ(grow_solution(state, 2, make_id(4), s, 3.0), GrowOutcome::Grew);
  EXPECT_EQ(state.coverage(), 3U);
  EXPECT_EQ(state.chosen, testing::ids({4}));
}

TEST(GrowSolutionTest, CoveredSetIsSkipped) {
  CoverageState state(10);
  const std::vector<Element> s{1, 2, 3};
  state.add(make_id(1), s);
  for (double threshold : {1.0, 2.0, 100.0}) {
    EXPECT_EQ(grow_solution(state, 5, make_id(2), s, threshold), GrowOutcome::Skipped);
  }
  const std::vector<Element> t{3, 4};
  EXPECT_EQ(grow_solution(state, 5, make_id(3), t, 2.0), GrowOutcome::Skipped);
  EXPECT_EQ(state.budget_used(), 1U);
}

TEST(GrowSolutionTest, BudgetBoundary) {
  CoverageState state(10);
  MetricsLedger ledger;
  const std::vector<Element> a{1}, b{2}, c{3};
  EXPECT_EQ(grow_solution(state, 2, make_id(1), a, 1.0, &ledger), GrowOutcome::Grew);
  EXPECT_EQ(grow_solution(state, 2, make_id(2), b, 1.0, &ledger), GrowOutcome::Grew);
  EXPECT_EQ(state.budget_used(), 2U);
  EXPECT_EQ(grow_solution(state, 2, make_id(3), c, 1.0, &ledger), GrowOutcome::BudgetFull);
  EXPECT_EQ(ledger.stored_elements(), 2U);
}

TEST(RunDynamicTest, SetAtBandBoundaryLandsInSecondBand) {
  // k = 4, v = 8: theta_1 = 8, theta_2 = 4. A set of size 2v/4 = 4 is in F_2.
  ReplayableStream stream = raw_stream(10, {rec(3, {1, 2, 3, 4})});
  const DynamicResult result = run_dynamic(stream, config(4, 8));
  ASSERT_GE(result.trace.iterations.size(), 1U);
  const IterationRecord& first = result.trace.iterations.front();
  EXPECT_EQ(first.phase, DynamicPhase::Cascade);
  EXPECT_EQ(first.draws, 4U);
  EXPECT_EQ(first.grew, 1U);
  EXPECT_EQ(first.band_violations, 0U);
  EXPECT_EQ(result.solution.coverage(), 4U);
}

TEST(RunDynamicTest, DisjointSetsGrowAtMostTwoPerIteration) {
  // k = 4, v = 5: sets of size 2v/2 = 5 all sit in F_1, sampled twice.
  std::vector<SetRecord> sets;
  for (Element i = 0; i < 4; ++i) sets.push_back(rec(i, {5 * i + 1, 5 * i + 2, 5 * i + 3, 5 * i + 4, 5 * i + 5}));
  const Instance instance(20, 4, sets);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ReplayableStream stream = stream_of(instance);
    const DynamicResult result = run_dynamic(stream, config(4, 5, seed));
    EXPECT_EQ(result.solution.coverage(), 20U);
    for (const IterationRecord& it : result.trace.iterations) {
      if (it.phase == DynamicPhase::Cascade) {
        EXPECT_LE(it.grew, 2U);
      }
    }
    EXPECT_GE(result.trace.cascade_iterations, 2U);
  }
}

TEST(RunDynamicTest, ExhaustedBandsEndTheRunWithoutAdding) {
  ReplayableStream stream = raw_stream(6, {rec(0, {1, 2}), rec(1, {1, 2})});
  const DynamicResult result = run_dynamic(stream, config(3, 2));
  EXPECT_EQ(result.solution.coverage(), 2U);
  EXPECT_EQ(result.solution.budget_used(), 1U);
  EXPECT_EQ(result.trace.terminal_passes, 1U);
  EXPECT_EQ(result.ledger.passes(),
            2 * loop_iterations(result.trace) + result.trace.terminal_passes + result.trace.retry_passes);
}

TEST(RunDynamicTest, SingletonTailBandGrowsWithCertainty) {
  // k = 1 skips the cascade; tau_1 = 4, so a set of size 3 lands in a tail band.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ReplayableStream stream = raw_stream(5, {rec(9, {1, 3, 5})});
    const DynamicResult result = run_dynamic(stream, config(1, 2, seed));
    EXPECT_EQ(result.trace.cascade_iterations, 0U);
    EXPECT_EQ(result.solution.chosen, testing::ids({9}));
    ASSERT_EQ(result.trace.iterations.size(), 1U);
    EXPECT_EQ(result.trace.iterations[0].phase, DynamicPhase::Tail);
    EXPECT_EQ(result.trace.iterations[0].grew, 1U);
  }
}

TEST(RunDynamicTest, OversizedSetRejectsTheGuess) {
  ReplayableStream stream = raw_stream(10, {rec(0, {1, 2, 3, 4, 5, 6, 7})});
  const DynamicResult result = run_dynamic(stream, config(2, 2));
  EXPECT_TRUE(result.trace.guess_rejected);
  EXPECT_EQ(result.solution.coverage(), 0U);
}

TEST(RunDynamicTest, DeletedSetsAreNeverChosen) {
  std::mt19937_64 rng(77);
  std::size_t met = 0;
  constexpr std::size_t kTrials = 40;
  for (std::size_t trial = 0; trial < kTrials; ++trial) {
    const Instance live = testing::random_instance(rng, {30, 6, 3});
    // As many distractors as live sets: 2m inserts, m deletes.
    const std::vector<StreamToken> tokens = testing::churned_stream(live, live.num_sets(), rng);
    ReplayableStream stream(tokens, live.universe_size());
    const std::size_t opt = testing::mask_opt(live);
    const DynamicResult result = run_dynamic(stream, config(live.budget(), testing::oracle_guess(opt), trial));
    for (SetId id : result.solution.chosen) EXPECT_TRUE(live.contains(id));
    EXPECT_EQ(result.solution.coverage(), testing::union_size(live, result.solution.chosen));
    EXPECT_LE(result.solution.coverage(), opt);
    if (static_cast<double>(result.solution.coverage()) >= (testing::greedy_factor() - 0.2) * static_cast<double>(opt)) {
      ++met;
    }
  }
  EXPECT_GE(met, kTrials * 9 / 10);
}

TEST(RunDynamicTest, OracleGuessMeetsGuaranteeOnRandomStreams) {
  std::mt19937_64 rng(2026);
  constexpr std::size_t kTrials = 200;
  std::size_t met = 0;
  for (std::size_t trial = 0; trial < kTrials; ++trial) {
    const Instance live = testing::random_instance(rng);
    const std::vector<StreamToken> tokens = testing::churned_stream(live, 4, rng);
    ReplayableStream stream(tokens, live.universe_size());
    const std::size_t opt = testing::mask_opt(live);
    DynamicConfig cfg = config(live.budget(), testing::oracle_guess(opt), trial);
    cfg.debug_ledger = true;
    const DynamicResult result = run_dynamic(stream, cfg);
    const DynamicTrace& trace = result.trace;
    EXPECT_FALSE(trace.guess_rejected);
    EXPECT_LE(result.solution.budget_used(), live.budget());
    std::size_t previous = 0;
    for (const IterationRecord& it : trace.iterations) {
      EXPECT_LE(it.retrieved_elements, it.retrieved_bound);
      EXPECT_EQ(it.band_violations, 0U);
      EXPECT_GE(it.coverage_after, previous);
      previous = it.coverage_after;
    }
    EXPECT_EQ(result.ledger.passes(), 2 * loop_iterations(trace) + trace.terminal_passes + trace.retry_passes);
    const std::size_t ell = std::max<std::size_t>(cfg.ell(), 1);
    EXPECT_LE(result.ledger.peak_stored_elements(), 8 * cfg.guess * ell + result.solution.coverage());
    if (static_cast<double>(result.solution.coverage()) >= (testing::greedy_factor() - 0.2) * static_cast<double>(opt)) {
      ++met;
    }
  }
  EXPECT_GE(met, kTrials * 9 / 10);
}

TEST(RunDynamicTest, PassCapAborts) {
  const Instance instance(6, 2, {rec(0, {1, 2}), rec(1, {3, 4})});
  ReplayableStream stream = stream_of(instance);
  DynamicConfig cfg = config(2, 2);
  cfg.pass_cap = 1;
  EXPECT_THROW(run_dynamic(stream, cfg), PassCapExceeded);
}

TEST(RunDynamicTest, RejectsZeroBudgetAndGuess) {
  const Instance instance(6, 1, {rec(0, {1, 2})});
  ReplayableStream stream = stream_of(instance);
  EXPECT_THROW(run_dynamic(stream, config(0, 2)), std::invalid_argument);
  EXPECT_THROW(run_dynamic(stream, config(1, 0)), std::invalid_argument);
}

TEST(GuessLadderTest, Shapes) {
  EXPECT_EQ(guess_ladder(1), std::vector<std::uint64_t>{1});
  EXPECT_EQ(guess_ladder(13), (std::vector<std::uint64_t>{1, 2, 4, 8, 16}));
  EXPECT_EQ(guess_ladder(16), (std::vector<std::uint64_t>{1, 2, 4, 8, 16}));
}

TEST(GuessLadderTest, OptThirteenHasAGuessWithinFactorTwo) {
  // Four disjoint sets of sizes 5, 4, 4, 3 and k = 3: opt = 13.
  const Instance instance(20, 3,
                          {rec(0, {1, 2, 3, 4, 5}), rec(1, {6, 7, 8, 9}), rec(2, {10, 11, 12, 13}),
                           rec(3, {14, 15, 16})});
  ASSERT_EQ(brute_force_opt(instance).value, 13U);
  std::size_t in_range = 0;
  for (std::uint64_t v : guess_ladder(instance.universe_size())) {
    if (2 * v >= 13 && v <= 13) {
      ++in_range;
      EXPECT_EQ(v, 8U);
    }
  }
  EXPECT_EQ(in_range, 1U);
  ReplayableStream stream = stream_of(instance);
  const DynamicResult result = run_dynamic(stream, config(3, 8));
  EXPECT_GE(static_cast<double>(result.solution.coverage()), (testing::greedy_factor() - 0.2) * 13.0);
}

TEST(GuessLadderTest, BestIsTheMaximumOverRuns) {
  std::mt19937_64 rng(5);
  for (std::size_t trial = 0; trial < 20; ++trial) {
    const Instance live = testing::random_instance(rng);
    ReplayableStream stream(testing::churned_stream(live, 3, rng), live.universe_size());
    const GuessLadderResult ladder = run_with_guesses(stream, live.budget(), 0.2, trial);
    ASSERT_EQ(ladder.runs.size(), guess_ladder(live.universe_size()).size());
    std::size_t max_passes = 0;
    std::size_t peak_sum = 0;
    for (const DynamicResult& run : ladder.runs) {
      EXPECT_GE(ladder.best.solution.coverage(), run.solution.coverage());
      max_passes = std::max(max_passes, run.ledger.passes());
      peak_sum += run.ledger.peak_stored_elements();
    }
    EXPECT_EQ(ladder.combined.passes(), max_passes);
    EXPECT_EQ(ladder.combined.peak_stored_elements(), peak_sum);
    for (SetId id : ladder.best.solution.chosen) EXPECT_TRUE(live.contains(id));
  }
}

// Sunflower: every set shares a core of 8 elements and owns one private
// element. Adding any set demotes all others from |S \ C| = 9 to 1.
Instance sunflower(std::size_t petals, std::size_t k) {
  std::vector<SetRecord> sets;
  for (std::size_t i = 0; i < petals; ++i) {
    sets.push_back(rec(i, {1, 2, 3, 4, 5, 6, 7, 8, static_cast<Element>(9 + i)}));
  }
  return Instance(static_cast<Element>(8 + petals), k, sets);
}

TEST(RunDynamicTest, DemotingInstanceStaysWithinUrnBound) {
  // k = 2, v = 10: theta_1 = tau_1 = 10, and size 9 lies in G_2 = [8.33, 10).
  const std::size_t petals = 6;
  const Instance instance = sunflower(petals, 2);
  const std::vector<double> script = mimic_script(instance, 9.0, 3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ReplayableStream stream = stream_of(instance);
    const DynamicResult result = run_dynamic(stream, config(2, 10, seed));
    ASSERT_GT(result.trace.tail_iterations.size(), 2U);
    const std::size_t iterations = result.trace.tail_iterations[2];

    MaxDamageAdversary max_damage;
    const UrnResult urn = run_single_urn(petals, 2, max_damage, seed);
    EXPECT_LE(iterations, urn.phases);

    ScriptedAdversary mimic(script);
    const UrnResult mimicked = run_single_urn(petals, 2, mimic, seed);
    EXPECT_LE(iterations, mimicked.phases);
    EXPECT_EQ(result.solution.coverage(), 10U);
  }
}

}  // namespace
}  // namespace streamcov
