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

#include "streamcov/multipoint.hpp"

#include <algorithm>

namespace streamcov {
namespace {

void trim(FieldPoly& poly) {
  while (!poly.empty() && poly.back() == 0) poly.pop_back();
}

// tree[level][node]; level 0 holds the linear factors.
using SubproductTree = std::vector<std::vector<FieldPoly>>;

SubproductTree build_tree(const PrimeField& field, std::span<const std::uint64_t> points) {
  SubproductTree tree;
  std::vector<FieldPoly> leaves;
  leaves.reserve(points.size());
  for (const std::uint64_t x : points) leaves.push_back({field.neg(field.reduce(x)), 1});
  tree.push_back(std::move(leaves));
  while (tree.back().size() > 1) {
    const std::vector<FieldPoly>& below = tree.back();
    std::vector<FieldPoly> level;
    level.reserve((below.size() + 1) / 2);
    for (std::size_t i = 0; i < below.size(); i += 2) {
      if (i + 1 < below.size()) {
        level.push_back(poly_multiply(field, below[i], below[i + 1]));
      } else {
        level.push_back(below[i]);
      }
    }
    tree.push_back(std::move(level));
  }
  return tree;
}

}  // namespace

std::uint64_t horner(const PrimeField& field, std::span<const std::uint64_t> coeffs,
                     std::uint64_t x) {
  std::uint64_t acc = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = field.add(field.mul(acc, x), *it);
  return acc;
}

FieldPoly poly_multiply(const PrimeField& field, std::span<const std::uint64_t> a,
                        std::span<const std::uint64_t> b) {
  if (a.empty() || b.empty()) return {};
  FieldPoly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = field.add(out[i + j], field.mul(a[i], b[j]));
  }
  return out;
}

FieldPoly poly_mod_monic(const PrimeField& field, std::span<const std::uint64_t> dividend,
                         std::span<const std::uint64_t> divisor) {
  FieldPoly rem(dividend.begin(), dividend.end());
  trim(rem);
  const std::size_t dd = divisor.size() - 1;
  if (rem.size() <= dd) return rem;
  for (std::size_t top = rem.size(); top-- > dd;) {
    const std::uint64_t lead = rem[top];
    if (lead == 0) continue;
    const std::size_t shift = top - dd;
    for (std::size_t j = 0; j <= dd; ++j) {
      rem[shift + j] = field.sub(rem[shift + j], field.mul(lead, divisor[j]));
    }
  }
  rem.resize(dd);
  trim(rem);
  return rem;
}

std::vector<std::uint64_t> multipoint_evaluate(const PrimeField& field,
                                               std::span<const std::uint64_t> coeffs,
                                               std::span<const std::uint64_t> points) {
  if (points.empty()) return {};
  const SubproductTree tree = build_tree(field, points);

  // Remainders at the current level, top-down.
  std::vector<FieldPoly> remainders{poly_mod_monic(field, coeffs, tree.back().front())};
  for (std::size_t level = tree.size() - 1; level-- > 0;) {
    const std::vector<FieldPoly>& nodes = tree[level];
    std::vector<FieldPoly> next;
    next.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      next.push_back(poly_mod_monic(field, remainders[i / 2], nodes[i]));
    }
    remainders = std::move(next);
  }

  std::vector<std::uint64_t> values;
  values.reserve(points.size());
  for (const FieldPoly& r : remainders) values.push_back(r.empty() ? 0 : r.front());
  return values;
}

}  // namespace streamcov
