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

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "streamcov/errors.hpp"
#include "streamcov/multipoint.hpp"

namespace streamcov {

Rational rational_from_decimal(double value) {
  constexpr std::int64_t kScale = 1'000'000;
  return Rational(static_cast<std::int64_t>(std::llround(value * kScale)), kScale);
}

HashPolynomial::HashPolynomial(PrimeField field, std::vector<std::uint64_t> coeffs)
    : field_(field), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("hash polynomial needs gamma >= 1");
  for (const std::uint64_t c : coeffs_) {
    if (c >= field_.prime()) throw BadField("coefficient outside the field");
  }
}

HashPolynomial sample_hash(std::size_t gamma, std::uint64_t prime, std::uint64_t seed) {
  if (gamma == 0) throw std::invalid_argument("gamma must be at least 1");
  PrimeField field(prime);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> coefficient(0, prime - 1);
  std::vector<std::uint64_t> coeffs(gamma);
  for (std::uint64_t& c : coeffs) c = coefficient(rng);
  return HashPolynomial(field, std::move(coeffs));
}

std::uint64_t eval_point(const HashPolynomial& hash, std::uint64_t x) { return hash(x); }

std::vector<std::uint64_t> eval_batch(const HashPolynomial& hash, std::span<const std::uint64_t> xs,
                                      std::size_t threshold) {
  std::vector<std::uint64_t> out;
  out.reserve(xs.size());
  const std::size_t window = std::max<std::size_t>({hash.gamma(), threshold, 1});
  for (std::size_t start = 0; start < xs.size(); start += window) {
    const std::span<const std::uint64_t> chunk = xs.subspan(start, std::min(window, xs.size() - start));
    if (chunk.size() >= threshold) {
      const std::vector<std::uint64_t> values = multipoint_evaluate(hash.field(), hash.coeffs(), chunk);
      out.insert(out.end(), values.begin(), values.end());
    } else {
      for (const std::uint64_t x : chunk) out.push_back(hash(x));
    }
  }
  return out;
}

std::size_t subsampling_gamma(std::size_t budget, std::size_t num_sets, double multiplier) {
  const double log_m = num_sets > 1 ? std::log2(static_cast<double>(num_sets)) : 0.0;
  const double gamma = std::ceil(multiplier * static_cast<double>(budget) * log_m);
  return std::max<std::size_t>(1, static_cast<std::size_t>(gamma));
}

Rational subsampling_lambda(std::size_t budget, const Rational& epsilon) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  return Rational(10 * static_cast<std::int64_t>(budget)) / (epsilon * epsilon);
}

namespace {

std::uint64_t cutoff_for(const Rational& keep, std::uint64_t prime) {
  if (keep < 0 || keep > 1) throw std::invalid_argument("keep probability outside [0, 1]");
  const unsigned __int128 scaled =
      static_cast<unsigned __int128>(keep.numerator()) * prime / static_cast<std::uint64_t>(keep.denominator());
  return static_cast<std::uint64_t>(scaled);
}

}  // namespace

Sparsifier::Sparsifier(const SparsifierParams& params)
    : hash_(sample_hash(subsampling_gamma(params.budget, params.num_sets, params.gamma_multiplier),
                        params.prime, params.seed)),
      lambda_(subsampling_lambda(params.budget, rational_from_decimal(params.epsilon))) {
  if (params.guess == 0) throw std::invalid_argument("guess v must be positive");
  keep_ = std::min(Rational(1), lambda_ / Rational(static_cast<std::int64_t>(params.guess)));
  cutoff_ = cutoff_for(keep_, hash_.prime());
}

Sparsifier::Sparsifier(HashPolynomial hash, Rational keep_probability)
    : hash_(std::move(hash)), lambda_(0), keep_(keep_probability) {
  cutoff_ = cutoff_for(keep_, hash_.prime());
}

std::vector<Element> Sparsifier::filter(std::span<const Element> elements) const {
  const std::span<const Element> lists[] = {elements};
  return std::move(filter_many(lists).front());
}

std::vector<std::vector<Element>> Sparsifier::filter_many(
    std::span<const std::span<const Element>> lists) const {
  std::vector<std::uint64_t> buffer;
  for (const auto& list : lists) buffer.insert(buffer.end(), list.begin(), list.end());
  const std::vector<std::uint64_t> hashed = eval_batch(hash_, buffer);
  std::vector<std::vector<Element>> out;
  out.reserve(lists.size());
  std::size_t pos = 0;
  for (const auto& list : lists) {
    std::vector<Element> kept;
    for (const Element e : list) {
      if (hashed[pos++] < cutoff_) kept.push_back(e);
    }
    out.push_back(std::move(kept));
  }
  return out;
}

Instance Sparsifier::sparsify(const Instance& instance) const {
  std::vector<std::span<const Element>> lists;
  lists.reserve(instance.num_sets());
  for (const SetRecord& record : instance.sets()) lists.emplace_back(record.elements);
  std::vector<std::vector<Element>> kept = filter_many(lists);
  std::vector<SetRecord> sets;
  sets.reserve(instance.num_sets());
  for (std::size_t i = 0; i < instance.num_sets(); ++i) {
    sets.push_back(SetRecord{instance.sets()[i].id, std::move(kept[i])});
  }
  return Instance(instance.universe_size(), instance.budget(), std::move(sets));
}

std::vector<StreamToken> Sparsifier::sparsify(std::span<const StreamToken> tokens) const {
  std::vector<std::span<const Element>> lists;
  lists.reserve(tokens.size());
  for (const StreamToken& token : tokens) lists.emplace_back(token.set.elements);
  std::vector<std::vector<Element>> kept = filter_many(lists);
  std::vector<StreamToken> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out.push_back(StreamToken{tokens[i].op, SetRecord{tokens[i].set.id, std::move(kept[i])}});
  }
  return out;
}

bool sparsify_element(const Sparsifier& sparsifier, Element e) { return sparsifier.keep(e); }

}  // namespace streamcov
