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

#include "streamcov/core_model.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "streamcov/errors.hpp"
#include "streamcov/field.hpp"
#include "support.hpp"

namespace streamcov {
namespace {

using testing::ids;
using testing::rec;

TEST(InstanceTest, RejectsMalformedInput) {
  EXPECT_THROW(Instance(5, 1, {rec(0, {2, 1})}), InvalidInstance);
  EXPECT_THROW(Instance(5, 1, {rec(0, {1, 1})}), InvalidInstance);
  EXPECT_THROW(Instance(5, 1, {rec(0, {6})}), InvalidInstance);
  EXPECT_THROW(Instance(5, 1, {rec(0, {0})}), InvalidInstance);
  EXPECT_THROW(Instance(5, 2, {rec(0, {1})}), InvalidInstance);
  EXPECT_THROW(Instance(5, 0, {rec(0, {1})}), InvalidInstance);
  EXPECT_THROW(Instance(5, 1, {rec(0, {1}), rec(0, {2})}), InvalidInstance);
  // m = 1, n = 5: ids must lie below 5.
  EXPECT_THROW(Instance(5, 1, {rec(5, {1})}), InvalidInstance);
  EXPECT_NO_THROW(Instance(5, 1, {rec(4, {1})}));
}

TEST(InstanceTest, FindAndContains) {
  const Instance instance(4, 1, {rec(3, {1, 2}), rec(7, {4})});
  EXPECT_TRUE(instance.contains(make_id(7)));
  EXPECT_FALSE(instance.contains(make_id(8)));
  EXPECT_EQ(instance.find(make_id(3)).elements, (std::vector<Element>{1, 2}));
  EXPECT_THROW(instance.find(make_id(8)), UnknownId);
}

TEST(CoverageTest, SpecExamples) {
  const Instance single(7, 1, {rec(0, {1, 4, 7})});
  EXPECT_EQ(coverage(single, {}), 0u);
  EXPECT_EQ(coverage(single, ids({0})), 3u);
  const Instance two(4, 1, {rec(1, {1, 2, 3}), rec(2, {3, 4})});
  EXPECT_EQ(coverage(two, ids({1, 2})), 4u);
  EXPECT_THROW(coverage(two, ids({9})), UnknownId);
}

TEST(CoverageTest, CoveredElementsMatchesUnion) {
  const Instance two(6, 1, {rec(1, {1, 2, 3}), rec(2, {3, 6})});
  const ElementSet c = covered_elements(two, ids({1, 2}));
  EXPECT_EQ(c.to_vector(), (std::vector<Element>{1, 2, 3, 6}));
}

TEST(BruteForceTest, SpecExamples) {
  const Instance one(3, 1, {rec(0, {1, 3})});
  EXPECT_EQ(brute_force_opt(one).value, 2u);

  const Instance three(4, 2, {rec(1, {1, 2}), rec(2, {2, 3}), rec(3, {3, 4})});
  const OptResult r = brute_force_opt(three);
  EXPECT_EQ(r.value, 4u);
  EXPECT_EQ(r.witness, ids({1, 3}));

  const Instance full(9, 3, {rec(0, {1, 2}), rec(1, {5, 9}), rec(2, {2, 7})});
  EXPECT_EQ(brute_force_opt(full).value, 5u);
}

TEST(BruteForceTest, TiesPickSmallestIdTuple) {
  const Instance tie(4, 1, {rec(5, {1, 2}), rec(2, {3, 4}), rec(9, {1, 4})});
  EXPECT_EQ(brute_force_opt(tie).witness, ids({2}));
}

TEST(BruteForceTest, RefusesOverCap) {
  std::vector<SetRecord> sets;
  for (std::uint64_t i = 0; i < 30; ++i) sets.push_back(rec(i, {static_cast<Element>(i % 5 + 1)}));
  const Instance big(5, 15, std::move(sets));
  EXPECT_THROW(brute_force_opt(big, 1000), TooLarge);
}

TEST(BruteForceTest, MatchesBitmaskOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance instance = testing::random_instance(rng);
    const OptResult r = brute_force_opt(instance);
    EXPECT_EQ(r.value, testing::mask_opt(instance));
    EXPECT_EQ(testing::union_size(instance, r.witness), r.value);
    EXPECT_EQ(r.witness.size(), instance.budget());
  }
}

TEST(BinomialTest, SmallValuesAndSaturation) {
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(4, 0), 1u);
  EXPECT_EQ(binomial(3, 4), 0u);
  EXPECT_EQ(binomial(200, 100), UINT64_MAX);
}

TEST(OfflineGreedyTest, SpecExamples) {
  const Instance disjoint(9, 2, {rec(0, {1, 2, 3, 4, 5}), rec(1, {6, 7, 8}), rec(2, {9})});
  const CoverageState a = offline_greedy(disjoint);
  EXPECT_EQ(a.chosen, ids({0, 1}));
  EXPECT_EQ(a.coverage(), 8u);

  const Instance trace(7, 2, {rec(1, {1, 2, 3, 4}), rec(2, {1, 2, 3, 5}), rec(3, {5, 6, 7})});
  const CoverageState b = offline_greedy(trace);
  EXPECT_EQ(b.chosen, ids({1, 3}));
  EXPECT_EQ(b.coverage(), 7u);

  const Instance same(3, 2, {rec(0, {1, 2, 3}), rec(1, {1, 2, 3})});
  const CoverageState c = offline_greedy(same);
  EXPECT_EQ(c.coverage(), 3u);
  EXPECT_LE(c.budget_used(), 2u);
}

TEST(OfflineGreedyTest, GuaranteeAndRecount) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const Instance instance = testing::random_instance(rng);
    const CoverageState g = offline_greedy(instance);
    EXPECT_LE(g.budget_used(), instance.budget());
    EXPECT_EQ(testing::union_size(instance, g.chosen), g.coverage());
    EXPECT_GE(static_cast<double>(g.coverage()),
              testing::greedy_factor() * static_cast<double>(testing::mask_opt(instance)) - 1e-9);
  }
}

TEST(ThresholdLadderTest, GeometricConstruction) {
  const ThresholdLadder ladder = ThresholdLadder::geometric(16.0, 4, 0.5);
  const auto t = ladder.thresholds();
  ASSERT_FALSE(t.empty());
  EXPECT_DOUBLE_EQ(t[0], 8.0);
  for (std::size_t i = 1; i < t.size(); ++i) EXPECT_NEAR(t[i - 1] / t[i], 1.5, 1e-12);
  const double floor = 16.0 / (4.0 * 2.718281828459045 * 4.0);
  EXPECT_LT(t.back(), floor);
  EXPECT_GE(t[t.size() - 2], floor);
  EXPECT_TRUE(ladder.satisfies(16.0, 4, 0.5));
  EXPECT_TRUE(ladder.satisfies(8.0, 4, 0.5) == (t.back() < 8.0 / (4.0 * 2.718281828459045 * 4.0)));
}

TEST(ThresholdLadderTest, RejectsBadLists) {
  EXPECT_THROW(ThresholdLadder({}), std::invalid_argument);
  EXPECT_THROW(ThresholdLadder({2.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(ThresholdLadder({1.0, -1.0}), std::invalid_argument);
  const ThresholdLadder steep({10.0, 1.0, 0.01});
  EXPECT_FALSE(steep.satisfies(4.0, 1, 0.5));
}

TEST(QuantizedGreedyTest, SpecExamples) {
  const std::vector<SetRecord> one{rec(0, {2, 3, 5})};
  const CoverageState a = quantized_greedy(one, 5, 1, ThresholdLadder::geometric(3.0, 1, 0.1));
  EXPECT_EQ(a.chosen, ids({0}));
  EXPECT_EQ(a.coverage(), 3u);

  const std::vector<SetRecord> equal{rec(0, {1, 2}), rec(1, {3, 4}), rec(2, {5, 6}), rec(3, {7, 8})};
  const CoverageState b = quantized_greedy(equal, 8, 3, ThresholdLadder({2.0, 1.0, 0.5}));
  EXPECT_EQ(b.chosen, ids({0, 1, 2}));
}

TEST(QuantizedGreedyTest, GuaranteeWithOracleGuess) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Instance instance = testing::random_instance(rng);
    const std::size_t opt = testing::mask_opt(instance);
    const double v = static_cast<double>(testing::oracle_guess(opt));
    const ThresholdLadder ladder = ThresholdLadder::geometric(v, instance.budget(), 0.1);
    const CoverageState q = quantized_greedy(instance.sets(), instance.universe_size(), instance.budget(), ladder);
    EXPECT_LE(q.budget_used(), instance.budget());
    EXPECT_EQ(testing::union_size(instance, q.chosen), q.coverage());
    EXPECT_GE(static_cast<double>(q.coverage()),
              (testing::greedy_factor() - 0.1) * static_cast<double>(opt) - 1e-9);
  }
}

TEST(AssignSetIdTest, SpecExamples) {
  EXPECT_EQ(raw(assign_set_id({}, 5, 101)), 1u);
  const std::vector<Element> two{2};
  EXPECT_EQ(raw(assign_set_id(two, 5, 101)), 3u);
  const std::vector<Element> three{1, 2, 3};
  EXPECT_EQ(raw(assign_set_id(three, 7, 101)), 19u);
  EXPECT_THROW(assign_set_id(three, 7, 100), BadField);
  EXPECT_THROW(assign_set_id(three, 101, 101), BadField);
}

TEST(AssignSetIdTest, InjectiveOnRandomSets) {
  // m = 1000 sets over n = 64, p >= m^3 n.
  const std::uint64_t p = 64'000'000'013ULL;
  ASSERT_TRUE(is_prime(p));
  std::mt19937_64 rng(14);
  std::set<std::vector<Element>> sets;
  std::bernoulli_distribution keep(0.3);
  while (sets.size() < 1000) {
    std::vector<Element> s;
    for (Element e = 1; e <= 64; ++e) {
      if (keep(rng)) s.push_back(e);
    }
    sets.insert(s);
  }
  std::uniform_int_distribution<std::uint64_t> point(0, p - 1);
  const std::uint64_t r = point(rng);
  std::set<std::uint64_t> seen;
  std::size_t collisions = 0;
  for (const auto& s : sets) {
    if (!seen.insert(raw(assign_set_id(s, r, p))).second) ++collisions;
  }
  EXPECT_LE(collisions, 1u);
}

TEST(StreamValidationTest, BalanceRules) {
  const std::vector<StreamToken> ok{{Op::Insert, rec(7, {1, 2})}, {Op::Delete, rec(7, {})},
                                    {Op::Insert, rec(7, {1, 2})}};
  EXPECT_NO_THROW(validate_stream(ok, 3));

  const std::vector<StreamToken> orphan{{Op::Insert, rec(1, {1})}, {Op::Delete, rec(2, {})}};
  try {
    validate_stream(orphan, 3);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 2u);
  }

  const std::vector<StreamToken> twice{{Op::Insert, rec(1, {1})}, {Op::Insert, rec(1, {1})}};
  EXPECT_THROW(validate_stream(twice, 3), ValidationError);

  const std::vector<StreamToken> changed{{Op::Insert, rec(1, {1})}, {Op::Delete, rec(1, {})},
                                         {Op::Insert, rec(1, {2})}};
  EXPECT_THROW(validate_stream(changed, 3), ValidationError);

  const std::vector<StreamToken> mismatch{{Op::Insert, rec(1, {1})}, {Op::Delete, rec(1, {2})}};
  EXPECT_THROW(validate_stream(mismatch, 3), ValidationError);

  const std::vector<StreamToken> range{{Op::Insert, rec(1, {4})}};
  EXPECT_THROW(validate_stream(range, 3), ValidationError);
}

TEST(StreamValidationTest, LiveInstance) {
  const std::vector<StreamToken> tokens{{Op::Insert, rec(7, {1, 2, 9})}, {Op::Insert, rec(3, {4})},
                                        {Op::Delete, rec(7, {})}};
  const Instance live = live_instance(tokens, 9, 1);
  ASSERT_EQ(live.num_sets(), 1u);
  EXPECT_EQ(live.sets()[0].id, make_id(3));
}

TEST(ReplayableStreamTest, ResolvesDeletesAndCountsPasses) {
  ReplayableStream stream({{Op::Insert, rec(7, {1, 2})}, {Op::Delete, rec(7, {})}, {Op::Insert, rec(2, {3})}}, 3);
  EXPECT_EQ(stream.distinct_ids(), 2u);
  EXPECT_EQ(stream.max_id(), 7u);
  EXPECT_EQ(stream.tokens()[1].set.elements, (std::vector<Element>{1, 2}));
  std::size_t seen = 0;
  stream.replay([&](const StreamToken&) { ++seen; });
  stream.replay([&](const StreamToken&) { ++seen; });
  EXPECT_EQ(seen, 6u);
  EXPECT_EQ(stream.passes(), 2u);
}

TEST(CoverageStateTest, AddReportsNewElements) {
  CoverageState state(6);
  EXPECT_EQ(state.add(make_id(1), std::vector<Element>{1, 2, 3}), 3u);
  EXPECT_EQ(state.add(make_id(2), std::vector<Element>{3, 4}), 1u);
  EXPECT_TRUE(state.has_chosen(make_id(2)));
  EXPECT_EQ(state.coverage(), 4u);
  EXPECT_EQ(state.budget_used(), 2u);
}

TEST(ElementSetTest, Operations) {
  ElementSet s(10);
  const std::vector<Element> a{1, 5, 10};
  EXPECT_EQ(s.insert_all(a), 3u);
  EXPECT_EQ(s.insert_all(a), 0u);
  const std::vector<Element> b{2, 5, 7};
  EXPECT_EQ(s.count_missing(b), 2u);
  EXPECT_EQ(s.missing(b), (std::vector<Element>{2, 7}));
  EXPECT_TRUE(s.contains(10));
  EXPECT_FALSE(s.contains(2));
  EXPECT_EQ(s.size(), 3u);
}

}  // namespace
}  // namespace streamcov
