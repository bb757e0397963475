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

#ifndef STREAMCOV_HASHING_HPP_
#define STREAMCOV_HASHING_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/rational.hpp>

#include "streamcov/core_model.hpp"
#include "streamcov/field.hpp"
#include "streamcov/multipoint.hpp"

namespace streamcov {

using Rational = boost::rational<std::int64_t>;

// Nearest rational with denominator dividing 10^6.
Rational rational_from_decimal(double value);

// Batches at or above this size go through the subproduct tree.
inline constexpr std::size_t kMultipointThreshold = 32;

// A uniformly drawn polynomial of degree gamma-1 over F_p: a gamma-wise
// independent hash family on [0, p).
class HashPolynomial {
 public:
  HashPolynomial(PrimeField field, std::vector<std::uint64_t> coeffs);

  const PrimeField& field() const { return field_; }
  std::uint64_t prime() const { return field_.prime(); }
  std::size_t gamma() const { return coeffs_.size(); }
  std::span<const std::uint64_t> coeffs() const { return coeffs_; }

  // Horner evaluation; x must be below the prime.
  std::uint64_t operator()(std::uint64_t x) const { return horner(field_, coeffs_, x); }

  friend bool operator==(const HashPolynomial&, const HashPolynomial&) = default;

 private:
  PrimeField field_;
  std::vector<std::uint64_t> coeffs_;
};

// Coefficients drawn from a generator seeded with `seed`. Throws BadField.
HashPolynomial sample_hash(std::size_t gamma, std::uint64_t prime, std::uint64_t seed);

std::uint64_t eval_point(const HashPolynomial& hash, std::uint64_t x);

// Same values as eval_point on every input. Works in windows of
// max(gamma, threshold) points; windows at or above `threshold` use
// multipoint evaluation, smaller ones Horner.
std::vector<std::uint64_t> eval_batch(const HashPolynomial& hash, std::span<const std::uint64_t> xs,
                                      std::size_t threshold = kMultipointThreshold);

struct SparsifierParams {
  std::size_t budget = 1;         // k
  double epsilon = 0.5;
  std::uint64_t guess = 1;        // v
  std::size_t num_sets = 2;       // m, sets gamma
  double gamma_multiplier = 2.0;  // gamma = ceil(c k log2 m)
  std::uint64_t seed = 0;
  std::uint64_t prime = kMersenne61;
};

// gamma = max(1, ceil(c k log2 m)).
std::size_t subsampling_gamma(std::size_t budget, std::size_t num_sets, double multiplier);

// lambda = 10 eps^-2 k, exactly.
Rational subsampling_lambda(std::size_t budget, const Rational& epsilon);

// Universe subsampling: keeps e iff h(e) lands in [0, floor(p_keep * prime)),
// with p_keep = min(1, lambda / v).
class Sparsifier {
 public:
  explicit Sparsifier(const SparsifierParams& params);
  // Explicit keep probability in [0, 1]; used where lambda/v is not the
  // natural parametrization.
  Sparsifier(HashPolynomial hash, Rational keep_probability);

  const HashPolynomial& hash() const { return hash_; }
  Rational lambda() const { return lambda_; }
  Rational keep_probability() const { return keep_; }
  std::uint64_t cutoff() const { return cutoff_; }

  bool keep(Element e) const { return hash_(e) < cutoff_; }

  // Filters one element list, preserving order.
  std::vector<Element> filter(std::span<const Element> elements) const;

  Instance sparsify(const Instance& instance) const;
  std::vector<StreamToken> sparsify(std::span<const StreamToken> tokens) const;

 private:
  // Hashes the concatenation of many element lists through one buffer and
  // splits the keep decisions back out.
  std::vector<std::vector<Element>> filter_many(
      std::span<const std::span<const Element>> lists) const;

  HashPolynomial hash_;
  Rational lambda_;
  Rational keep_;
  std::uint64_t cutoff_ = 0;
};

bool sparsify_element(const Sparsifier& sparsifier, Element e);

}  // namespace streamcov

#endif  // STREAMCOV_HASHING_HPP_
