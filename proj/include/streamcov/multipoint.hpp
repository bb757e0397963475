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

#ifndef STREAMCOV_MULTIPOINT_HPP_
#define STREAMCOV_MULTIPOINT_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "streamcov/field.hpp"

namespace streamcov {

// Dense polynomial over F_p, coefficients from the constant term upward.
using FieldPoly = std::vector<std::uint64_t>;

std::uint64_t horner(const PrimeField& field, std::span<const std::uint64_t> coeffs,
                     std::uint64_t x);

FieldPoly poly_multiply(const PrimeField& field, std::span<const std::uint64_t> a,
                        std::span<const std::uint64_t> b);

// Remainder of `dividend` modulo a monic `divisor`.
FieldPoly poly_mod_monic(const PrimeField& field, std::span<const std::uint64_t> dividend,
                         std::span<const std::uint64_t> divisor);

// Evaluates a polynomial at every point with a subproduct tree: build the
// products of (X - x_i) bottom-up, then reduce the polynomial down the tree.
std::vector<std::uint64_t> multipoint_evaluate(const PrimeField& field,
                                               std::span<const std::uint64_t> coeffs,
                                               std::span<const std::uint64_t> points);

}  // namespace streamcov

#endif  // STREAMCOV_MULTIPOINT_HPP_
