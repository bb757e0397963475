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

#include "streamcov/field.hpp"

#include <array>
#include <string>

#include "streamcov/errors.hpp"

namespace streamcov {
namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exponent, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exponent > 0) {
    if (exponent & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exponent >>= 1;
  }
  return result;
}

}  // namespace

bool is_prime(std::uint64_t value) {
  if (value < 2) return false;
  constexpr std::array<std::uint64_t, 12> kBases = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (const std::uint64_t p : kBases) {
    if (value % p == 0) return value == p;
  }
  std::uint64_t d = value - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (const std::uint64_t a : kBases) {
    std::uint64_t x = powmod(a, d, value);
    if (x == 1 || x == value - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, value);
      if (x == value - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t prime) : prime_(prime) {
  if (prime >= (std::uint64_t{1} << 63) || !is_prime(prime)) {
    throw BadField("modulus " + std::to_string(prime) + " is not a usable prime");
  }
}

std::uint64_t PrimeField::pow(std::uint64_t base, std::uint64_t exponent) const {
  return powmod(base, exponent, prime_);
}

std::uint64_t PrimeField::inverse(std::uint64_t a) const {
  return powmod(a, prime_ - 2, prime_);
}

}  // namespace streamcov
