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

// Shared helpers for tests: random small instances and oracles that do
// not go through the library's own evaluation code.

#ifndef STREAMCOV_TESTS_SUPPORT_HPP_
#define STREAMCOV_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "streamcov/core_model.hpp"

namespace streamcov::testing {

inline SetRecord rec(std::uint64_t id, std::vector<Element> elements) {
  return SetRecord{make_id(id), std::move(elements)};
}

inline std::vector<SetId> ids(std::initializer_list<std::uint64_t> raw_ids) {
  std::vector<SetId> out;
  for (std::uint64_t v : raw_ids) out.push_back(make_id(v));
  return out;
}

// |union| computed with std::set.
inline std::size_t union_size(const Instance& instance, const std::vector<SetId>& chosen) {
  std::set<Element> all;
  for (SetId id : chosen) {
    for (const SetRecord& s : instance.sets()) {
      if (s.id == id) all.insert(s.elements.begin(), s.elements.end());
    }
  }
  return all.size();
}

// Exact optimum by scanning every bitmask with popcount k.
inline std::size_t mask_opt(const Instance& instance) {
  const std::size_t m = instance.num_sets();
  const std::size_t k = instance.budget();
  std::size_t best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
    std::set<Element> all;
    for (std::size_t i = 0; i < m; ++i) {
      if ((mask >> i) & 1U) all.insert(instance.sets()[i].elements.begin(), instance.sets()[i].elements.end());
    }
    best = std::max(best, all.size());
  }
  return best;
}

struct RandomInstanceShape {
  Element max_n = 30;
  std::size_t max_m = 12;
  std::size_t max_k = 4;
};

// Random instance with n <= max_n, m <= max_m, k <= min(max_k, m); sets are
// non-empty with a random density, ids are random distinct values.
inline Instance random_instance(std::mt19937_64& rng, RandomInstanceShape shape = {}) {
  std::uniform_int_distribution<Element> pick_n(4, shape.max_n);
  const Element n = pick_n(rng);
  std::uniform_int_distribution<std::size_t> pick_m(2, shape.max_m);
  const std::size_t m = pick_m(rng);
  std::uniform_int_distribution<std::size_t> pick_k(1, std::min(shape.max_k, m));
  const std::size_t k = pick_k(rng);
  std::uniform_real_distribution<double> pick_density(0.05, 0.5);
  std::uniform_int_distribution<Element> any(1, n);
  std::vector<std::uint64_t> pool(m * 3);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<SetRecord> sets;
  for (std::size_t i = 0; i < m; ++i) {
    const double density = pick_density(rng);
    std::bernoulli_distribution keep(density);
    std::vector<Element> elements;
    for (Element e = 1; e <= n; ++e) {
      if (keep(rng)) elements.push_back(e);
    }
    if (elements.empty()) elements.push_back(any(rng));
    sets.push_back(rec(pool[i], std::move(elements)));
  }
  return Instance(n, k, std::move(sets));
}

inline std::vector<StreamToken> inserts(const Instance& instance) {
  std::vector<StreamToken> tokens;
  for (const SetRecord& s : instance.sets()) tokens.push_back({Op::Insert, s});
  return tokens;
}

// A dynamic stream whose live sets are exactly `instance`: every live set is
// inserted once, and `extra` distractor sets are inserted and deleted again
// at random later points.
inline std::vector<StreamToken> churned_stream(const Instance& instance, std::size_t extra, std::mt19937_64& rng) {
  std::uint64_t next_id = 0;
  for (const SetRecord& s : instance.sets()) next_id = std::max(next_id, raw(s.id) + 1);
  std::vector<StreamToken> tokens = inserts(instance);
  std::uniform_int_distribution<Element> any(1, instance.universe_size());
  for (std::size_t i = 0; i < extra; ++i) {
    std::set<Element> elements;
    const std::size_t size = 1 + rng() % instance.universe_size();
    while (elements.size() < size) elements.insert(any(rng));
    const SetRecord set = rec(next_id++, {elements.begin(), elements.end()});
    std::uniform_int_distribution<std::size_t> slot(0, tokens.size());
    const std::size_t at = slot(rng);
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(at), StreamToken{Op::Insert, set});
    std::uniform_int_distribution<std::size_t> later(at + 1, tokens.size());
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(later(rng)), StreamToken{Op::Delete, rec(raw(set.id), {})});
  }
  return tokens;
}

// The largest power of two not above opt.
inline std::uint64_t oracle_guess(std::size_t opt) {
  return opt == 0 ? 1 : std::bit_floor(static_cast<std::uint64_t>(opt));
}

inline double greedy_factor() { return 1.0 - 1.0 / 2.718281828459045; }

}  // namespace streamcov::testing

#endif  // STREAMCOV_TESTS_SUPPORT_HPP_
