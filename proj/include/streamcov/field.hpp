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

#ifndef STREAMCOV_FIELD_HPP_
#define STREAMCOV_FIELD_HPP_

#include <cstdint>

namespace streamcov {

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::uint64_t value);

// Arithmetic modulo a prime p < 2^63. Values are canonical residues in [0, p).
class PrimeField {
 public:
  // Throws BadField if `prime` is not prime or is too large.
  explicit PrimeField(std::uint64_t prime);

  std::uint64_t prime() const { return prime_; }

  std::uint64_t reduce(std::uint64_t a) const { return a % prime_; }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    const std::uint64_t s = a + b;
    return s >= prime_ ? s - prime_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + prime_ - b;
  }
  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : prime_ - a; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % prime_);
  }
  std::uint64_t pow(std::uint64_t base, std::uint64_t exponent) const;
  // Multiplicative inverse of a nonzero residue.
  std::uint64_t inverse(std::uint64_t a) const;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint64_t prime_;
};

// SplitMix64 finalizer; used to derive independent sub-seeds from one seed.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace streamcov

#endif  // STREAMCOV_FIELD_HPP_
