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

#include "streamcov/hashing.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "streamcov/errors.hpp"
#include "support.hpp"

namespace streamcov {
namespace {

using testing::rec;

// Keep rate must land within three binomial standard deviations.
void expect_keep_rate(const Sparsifier& s, double p, std::size_t count) {
  std::size_t kept = 0;
  for (Element e = 1; e <= count; ++e) kept += s.keep(e) ? 1 : 0;
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(count));
  EXPECT_NEAR(static_cast<double>(kept) / static_cast<double>(count), p, 3 * sigma) << "p_keep " << p;
}

TEST(HashPolynomialTest, ValidatesCoefficients) {
  EXPECT_THROW(HashPolynomial(PrimeField(101), {}), std::invalid_argument);
  EXPECT_THROW(HashPolynomial(PrimeField(101), {101}), BadField);
  EXPECT_THROW(sample_hash(2, 100, 0), BadField);
}

TEST(SampleHashTest, ConstantWhenGammaIsOne) {
  const HashPolynomial h = sample_hash(1, 101, 5);
  for (std::uint64_t x = 0; x < 101; ++x) EXPECT_EQ(h(x), h(0));
}

TEST(SampleHashTest, DeterministicPerSeed) {
  EXPECT_EQ(sample_hash(8, kMersenne61, 42), sample_hash(8, kMersenne61, 42));
  EXPECT_NE(sample_hash(8, kMersenne61, 42), sample_hash(8, kMersenne61, 43));
}

TEST(SampleHashTest, PairwiseCollisionRate) {
  constexpr int kPairs = 10'000;
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::uint64_t> point(0, 100);
  int collisions = 0;
  for (int i = 0; i < kPairs; ++i) {
    const HashPolynomial h = sample_hash(3, 101, 1000 + i);
    const std::uint64_t x = point(rng);
    std::uint64_t y = point(rng);
    while (y == x) y = point(rng);
    collisions += h(x) == h(y) ? 1 : 0;
  }
  const double p = 1.0 / 101.0;
  const double sigma = std::sqrt(p * (1 - p) / kPairs);
  EXPECT_NEAR(static_cast<double>(collisions) / kPairs, p, 3 * sigma);
}

TEST(EvalPointTest, SpecExamples) {
  const PrimeField f(101);
  const HashPolynomial constant(f, {17});
  EXPECT_EQ(eval_point(constant, 0), 17u);
  EXPECT_EQ(eval_point(constant, 88), 17u);
  EXPECT_EQ(eval_point(HashPolynomial(f, {1, 1}), 5), 6u);
  EXPECT_EQ(eval_point(HashPolynomial(f, {2, 3, 4}), 10), 28u);
}

TEST(EvalBatchTest, MatchesPointwise) {
  const HashPolynomial h = sample_hash(40, kMersenne61, 9);
  EXPECT_TRUE(eval_batch(h, {}).empty());
  std::mt19937_64 rng(32);
  for (const std::size_t count : {std::size_t{1}, std::size_t{31}, std::size_t{32}, std::size_t{64}, std::size_t{100}}) {
    std::vector<std::uint64_t> xs(count);
    for (auto& x : xs) x = rng() % kMersenne61;
    const auto out = eval_batch(h, xs);
    ASSERT_EQ(out.size(), count);
    for (std::size_t i = 0; i < count; ++i) EXPECT_EQ(out[i], eval_point(h, xs[i]));
  }
  const std::vector<std::uint64_t> dup{77, 77};
  const auto twice = eval_batch(h, dup);
  EXPECT_EQ(twice[0], twice[1]);
}

TEST(SubsamplingTest, LambdaAndGamma) {
  EXPECT_EQ(subsampling_lambda(4, Rational(1, 2)), Rational(160));
  EXPECT_EQ(subsampling_lambda(3, Rational(1, 5)), Rational(750));
  EXPECT_EQ(rational_from_decimal(0.2), Rational(1, 5));
  EXPECT_EQ(subsampling_gamma(4, 16, 2.0), 32u);
  EXPECT_EQ(subsampling_gamma(1, 1, 2.0), 1u);
}

TEST(SparsifierTest, KeepProbabilityFromParams) {
  SparsifierParams params;
  params.budget = 4;
  params.epsilon = 0.5;
  params.guess = 320;
  params.num_sets = 16;
  params.seed = 3;
  const Sparsifier s(params);
  EXPECT_EQ(s.lambda(), Rational(160));
  EXPECT_EQ(s.keep_probability(), Rational(1, 2));
  EXPECT_EQ(s.hash().gamma(), 32u);
  expect_keep_rate(s, 0.5, 100'000);

  params.guess = 100;  // lambda >= v clamps to 1
  EXPECT_EQ(Sparsifier(params).keep_probability(), Rational(1));
}

TEST(SparsifierTest, KeepRatesAcrossProbabilities) {
  for (const auto& [num, den] : {std::pair{1, 10}, std::pair{1, 2}, std::pair{9, 10}}) {
    const Sparsifier s(sample_hash(16, kMersenne61, 77 + num), Rational(num, den));
    expect_keep_rate(s, static_cast<double>(num) / den, 100'000);
  }
}

TEST(SparsifierTest, BoundaryProbabilities) {
  const Sparsifier all(sample_hash(4, kMersenne61, 1), Rational(1));
  const Sparsifier none(sample_hash(4, kMersenne61, 1), Rational(0));
  for (Element e = 1; e <= 1000; ++e) {
    EXPECT_TRUE(sparsify_element(all, e));
    EXPECT_FALSE(sparsify_element(none, e));
  }
  EXPECT_THROW(Sparsifier(sample_hash(4, kMersenne61, 1), Rational(3, 2)), std::invalid_argument);
}

TEST(SparsifierTest, DeterministicDecisions) {
  const Sparsifier s(sample_hash(8, kMersenne61, 5), Rational(1, 3));
  const Sparsifier again(sample_hash(8, kMersenne61, 5), Rational(1, 3));
  for (Element e = 1; e <= 2000; ++e) {
    EXPECT_EQ(s.keep(e), s.keep(e));
    EXPECT_EQ(s.keep(e), again.keep(e));
  }
}

TEST(SparsifierTest, InstanceAndStreamFiltering) {
  const Instance instance(6, 1, {rec(3, {1, 2, 3, 4, 5, 6}), rec(5, {}), rec(1, {2, 6})});
  const Sparsifier all(sample_hash(4, kMersenne61, 2), Rational(1));
  const Instance same = all.sparsify(instance);
  for (std::size_t i = 0; i < instance.num_sets(); ++i) EXPECT_EQ(same.sets()[i], instance.sets()[i]);

  const Sparsifier half(sample_hash(4, kMersenne61, 2), Rational(1, 2));
  const Instance thin = half.sparsify(instance);
  for (std::size_t i = 0; i < instance.num_sets(); ++i) {
    EXPECT_EQ(thin.sets()[i].id, instance.sets()[i].id);
    std::vector<Element> expected;
    for (Element e : instance.sets()[i].elements) {
      if (half.keep(e)) expected.push_back(e);
    }
    EXPECT_EQ(thin.sets()[i].elements, expected);
  }
  EXPECT_TRUE(thin.sets()[1].elements.empty());

  const std::vector<StreamToken> tokens = testing::inserts(instance);
  const std::vector<StreamToken> filtered = half.sparsify(tokens);
  for (std::size_t i = 0; i < tokens.size(); ++i) EXPECT_EQ(filtered[i].set, thin.sets()[i]);
}

TEST(SparsifierTest, SparsifiedSetSizesStaySmall) {
  // k = 2, eps = 0.5: lambda = 80. Sets of size up to 4000 with opt near
  // 8000 and v = 4096 keep about 80/4096 of their elements.
  std::mt19937_64 rng(33);
  std::vector<SetRecord> sets;
  for (std::uint64_t i = 0; i < 8; ++i) {
    std::vector<Element> elements;
    const Element start = static_cast<Element>(1 + 1000 * i);
    for (Element e = start; e < start + 4000; ++e) elements.push_back(e);
    sets.push_back(rec(i, elements));
  }
  const Instance instance(12'000, 2, std::move(sets));
  SparsifierParams params;
  params.budget = 2;
  params.epsilon = 0.5;
  params.guess = 4096;
  params.num_sets = 8;
  params.seed = 4;
  const Sparsifier s(params);
  const double bound = 10.0 * 80.0 * std::log2(8.0);
  const Instance thin = s.sparsify(instance);
  for (const SetRecord& set : thin.sets()) EXPECT_LE(static_cast<double>(set.elements.size()), bound);
}

}  // namespace
}  // namespace streamcov
