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

#include "streamcov/generator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

#include "streamcov/errors.hpp"

namespace streamcov {

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Disjoint: return "disjoint";
    case ProfileKind::Overlapping: return "overlapping";
    case ProfileKind::PlantedOpt: return "planted";
    case ProfileKind::AdversarialLadder: return "ladder";
  }
  return "unknown";
}

ProfileKind parse_profile_kind(const std::string& name) {
  if (name == "disjoint") return ProfileKind::Disjoint;
  if (name == "overlapping") return ProfileKind::Overlapping;
  if (name == "planted") return ProfileKind::PlantedOpt;
  if (name == "ladder") return ProfileKind::AdversarialLadder;
  throw InvalidProfile("unknown profile kind '" + name + "'");
}

namespace {

struct Pool {
  std::vector<std::vector<Element>> sets;
  std::vector<bool> planted;
};

// Splits `elements` into `parts` contiguous runs of near-equal size.
std::vector<std::vector<Element>> split(const std::vector<Element>& elements, std::size_t parts) {
  std::vector<std::vector<Element>> out(parts);
  const std::size_t base = elements.size() / parts;
  const std::size_t extra = elements.size() % parts;
  std::size_t pos = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    out[p].assign(elements.begin() + static_cast<std::ptrdiff_t>(pos),
                  elements.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(out[p].begin(), out[p].end());
    pos += len;
  }
  return out;
}

std::vector<Element> random_subset(const std::vector<Element>& from, std::size_t size, std::mt19937_64& rng) {
  std::vector<Element> out;
  std::sample(from.begin(), from.end(), std::back_inserter(out), size, rng);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Element> iota_elements(Element n) {
  std::vector<Element> out(n);
  std::iota(out.begin(), out.end(), Element{1});
  return out;
}

Pool disjoint_pool(const GeneratorProfile& p) {
  if (p.num_sets > p.universe) throw InvalidProfile("disjoint profile needs m <= n");
  Pool pool;
  pool.sets = split(iota_elements(p.universe), p.num_sets);
  pool.planted.assign(p.num_sets, false);
  return pool;
}

Pool overlapping_pool(const GeneratorProfile& p, std::mt19937_64& rng) {
  if (!(p.density > 0.0 && p.density <= 1.0)) throw InvalidProfile("density must lie in (0, 1]");
  Pool pool;
  std::bernoulli_distribution keep(p.density);
  std::uniform_int_distribution<Element> any(1, p.universe);
  for (std::size_t i = 0; i < p.num_sets; ++i) {
    std::vector<Element> set;
    for (Element e = 1; e <= p.universe; ++e) {
      if (keep(rng)) set.push_back(e);
    }
    if (set.empty()) set.push_back(any(rng));
    pool.sets.push_back(std::move(set));
  }
  pool.planted.assign(p.num_sets, false);
  return pool;
}

Pool planted_pool(const GeneratorProfile& p, std::mt19937_64& rng) {
  const Element n = p.universe;
  if (p.budget > n) throw InvalidProfile("planted profile needs k <= cover size");
  std::vector<Element> elements = iota_elements(n);
  std::shuffle(elements.begin(), elements.end(), rng);
  Pool pool;
  pool.sets = split(elements, p.budget);
  pool.planted.assign(p.budget, true);
  const auto part = static_cast<std::size_t>(std::ceil(1.2 * static_cast<double>(n) / static_cast<double>(p.budget)));
  std::uniform_int_distribution<std::size_t> size(1, std::min<std::size_t>(part, n));
  const std::vector<Element> all = iota_elements(n);
  for (std::size_t i = p.budget; i < p.num_sets; ++i) {
    pool.sets.push_back(random_subset(all, size(rng), rng));
    pool.planted.push_back(false);
  }
  return pool;
}

// k disjoint planted blocks covering [1, n], plus distractors drawn from the
// whole universe with sizes n/2, n/4, ..., so their residuals start in every
// threshold band and each admission demotes the sets it overlaps.
Pool ladder_pool(const GeneratorProfile& p, std::mt19937_64& rng) {
  if (p.budget > p.universe) throw InvalidProfile("ladder profile needs k <= n");
  Pool pool;
  for (auto& block : split(iota_elements(p.universe), p.budget)) {
    pool.sets.push_back(std::move(block));
    pool.planted.push_back(true);
  }
  const std::vector<Element> all = iota_elements(p.universe);
  const std::size_t rungs = std::max<std::size_t>(1, static_cast<std::size_t>(std::bit_width(p.universe)) - 1);
  std::uniform_int_distribution<std::size_t> rung(1, rungs);
  for (std::size_t i = p.budget; i < p.num_sets; ++i) {
    const std::size_t size = std::max<std::size_t>(1, p.universe >> rung(rng));
    pool.sets.push_back(random_subset(all, size, rng));
    pool.planted.push_back(false);
  }
  return pool;
}

}  // namespace

GeneratedData generate(const GeneratorProfile& profile) {
  GeneratorProfile p = profile;
  if (p.kind == ProfileKind::PlantedOpt) {
    if (p.universe == 0) p.universe = static_cast<Element>(p.cover);
    if (p.cover != 0 && p.cover != p.universe) throw InvalidProfile("planted profile needs n equal to the cover size");
  }
  if (p.universe == 0) throw InvalidProfile("universe must be non-empty");
  if (p.num_sets == 0 || p.budget == 0) throw InvalidProfile("m and k must be positive");
  if (p.budget > p.num_sets) throw InvalidProfile("k must not exceed m");
  if (!(p.churn >= 0.0 && p.churn <= 1.0)) throw InvalidProfile("churn must lie in [0, 1]");

  std::mt19937_64 rng(p.seed);
  Pool pool;
  switch (p.kind) {
    case ProfileKind::Disjoint: pool = disjoint_pool(p); break;
    case ProfileKind::Overlapping: pool = overlapping_pool(p, rng); break;
    case ProfileKind::PlantedOpt: pool = planted_pool(p, rng); break;
    case ProfileKind::AdversarialLadder: pool = ladder_pool(p, rng); break;
  }

  const std::size_t m = pool.sets.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  // Position j of the stream holds pool set order[j] under id j.
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < m; ++j) {
    if (!pool.planted[order[j]]) candidates.push_back(j);
  }
  const auto deletions = static_cast<std::size_t>(std::floor(p.churn * static_cast<double>(m)));
  if (deletions > candidates.size()) throw InvalidProfile("churn would delete planted sets");
  if (m - deletions < p.budget) throw InvalidProfile("churn leaves fewer than k live sets");
  std::vector<std::size_t> deleted;
  std::sample(candidates.begin(), candidates.end(), std::back_inserter(deleted), deletions, rng);

  // Insert j sorts at key 2j; a delete of j lands after a uniform later insert.
  std::vector<std::pair<std::size_t, StreamToken>> keyed;
  for (std::size_t j = 0; j < m; ++j) {
    keyed.push_back({2 * j, StreamToken{Op::Insert, SetRecord{make_id(j), pool.sets[order[j]]}}});
  }
  for (std::size_t j : deleted) {
    std::uniform_int_distribution<std::size_t> after(j, m - 1);
    keyed.push_back({2 * after(rng) + 1, StreamToken{Op::Delete, SetRecord{make_id(j), {}}}});
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<StreamToken> stream;
  stream.reserve(keyed.size());
  for (auto& [key, token] : keyed) stream.push_back(std::move(token));

  const std::unordered_set<std::size_t> gone(deleted.begin(), deleted.end());
  std::vector<SetRecord> live;
  std::optional<Certificate> certificate;
  std::vector<SetId> planted_ids;
  for (std::size_t j = 0; j < m; ++j) {
    if (gone.contains(j)) continue;
    live.push_back({make_id(j), pool.sets[order[j]]});
    if (pool.planted[order[j]]) planted_ids.push_back(make_id(j));
  }
  Instance instance(p.universe, p.budget, std::move(live));

  if (p.kind == ProfileKind::PlantedOpt || p.kind == ProfileKind::AdversarialLadder) {
    certificate = Certificate{p.universe, planted_ids};
  } else if (p.kind == ProfileKind::Disjoint) {
    std::vector<SetRecord> sets(instance.sets().begin(), instance.sets().end());
    std::stable_sort(sets.begin(), sets.end(), [](const SetRecord& a, const SetRecord& b) {
      if (a.elements.size() != b.elements.size()) return a.elements.size() > b.elements.size();
      return raw(a.id) < raw(b.id);
    });
    Certificate c;
    for (std::size_t i = 0; i < p.budget; ++i) {
      c.ids.push_back(sets[i].id);
      c.value += sets[i].elements.size();
    }
    std::sort(c.ids.begin(), c.ids.end(), [](SetId a, SetId b) { return raw(a) < raw(b); });
    certificate = c;
  }
  if (certificate && coverage(instance, certificate->ids) != certificate->value) {
    throw InvalidProfile("generated certificate does not reach its claimed coverage");
  }
  return GeneratedData{std::move(instance), std::move(stream), std::move(certificate)};
}

}  // namespace streamcov
