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

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_set>

#include "streamcov/errors.hpp"
#include "streamcov/field.hpp"

namespace streamcov {
namespace {

std::string id_string(SetId id) { return std::to_string(raw(id)); }

// m^3 n, saturating.
unsigned __int128 id_space_bound(std::size_t m, Element n) {
  const unsigned __int128 mm = m;
  return mm * mm * mm * n;
}

using Words = std::vector<std::uint64_t>;

Words to_words(const SetRecord& record, Element universe) {
  Words words((universe >> 6) + 1, 0);
  for (const Element e : record.elements) words[e >> 6] |= std::uint64_t{1} << (e & 63);
  return words;
}

}  // namespace

std::string describe_record_problem(const SetRecord& record, Element universe) {
  for (std::size_t i = 0; i < record.elements.size(); ++i) {
    const Element e = record.elements[i];
    if (e < 1 || e > universe) {
      return "element " + std::to_string(e) + " outside [1, " + std::to_string(universe) + "]";
    }
    if (i > 0 && record.elements[i - 1] >= e) return "elements not strictly increasing";
  }
  return {};
}

Instance::Instance(Element universe, std::size_t budget, std::vector<SetRecord> sets)
    : universe_(universe), budget_(budget), sets_(std::move(sets)) {
  if (universe_ < 1) throw InvalidInstance("universe size must be at least 1");
  if (budget_ < 1 || budget_ > sets_.size()) {
    throw InvalidInstance("budget " + std::to_string(budget_) + " outside [1, " +
                          std::to_string(sets_.size()) + "]");
  }
  const unsigned __int128 bound = id_space_bound(sets_.size(), universe_);
  index_.reserve(sets_.size());
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    const SetRecord& record = sets_[i];
    if (raw(record.id) >= bound) {
      throw InvalidInstance("set id " + id_string(record.id) + " outside [0, m^3 n)");
    }
    if (const std::string problem = describe_record_problem(record, universe_); !problem.empty()) {
      throw InvalidInstance("set " + id_string(record.id) + ": " + problem);
    }
    if (!index_.emplace(record.id, i).second) {
      throw InvalidInstance("duplicate set id " + id_string(record.id));
    }
  }
}

const SetRecord& Instance::find(SetId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw UnknownId("unknown set id " + id_string(id));
  return sets_[it->second];
}

bool CoverageState::has_chosen(SetId id) const {
  return std::find(chosen.begin(), chosen.end(), id) != chosen.end();
}

std::size_t CoverageState::add(SetId id, std::span<const Element> elements) {
  chosen.push_back(id);
  return covered.insert_all(elements);
}

ElementSet covered_elements(const Instance& instance, std::span<const SetId> ids) {
  ElementSet covered(instance.universe_size());
  for (const SetId id : ids) covered.insert_all(instance.find(id).elements);
  return covered;
}

std::size_t coverage(const Instance& instance, std::span<const SetId> ids) {
  return covered_elements(instance, ids).size();
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    result = result * (n - r + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(result);
}

OptResult brute_force_opt(const Instance& instance, std::uint64_t cap) {
  const std::size_t m = instance.num_sets();
  const std::size_t k = instance.budget();
  const std::uint64_t subsets = binomial(m, k);
  if (subsets > cap) {
    throw TooLarge("C(" + std::to_string(m) + ", " + std::to_string(k) + ") = " +
                   std::to_string(subsets) + " exceeds cap " + std::to_string(cap));
  }

  std::vector<const SetRecord*> order;
  order.reserve(m);
  for (const SetRecord& record : instance.sets()) order.push_back(&record);
  std::sort(order.begin(), order.end(),
            [](const SetRecord* a, const SetRecord* b) { return raw(a->id) < raw(b->id); });
  std::vector<Words> words;
  words.reserve(m);
  for (const SetRecord* record : order) words.push_back(to_words(*record, instance.universe_size()));

  const std::size_t width = words.empty() ? 0 : words.front().size();
  // partial[d] holds the union of the first d chosen sets.
  std::vector<Words> partial(k + 1, Words(width, 0));
  std::vector<std::size_t> pick(k);
  std::vector<std::size_t> best_pick;
  std::size_t best = 0;
  bool have_best = false;

  // Depth-first enumeration in lexicographic order of index tuples.
  auto recurse = [&](auto&& self, std::size_t depth, std::size_t start) -> void {
    if (depth == k) {
      std::size_t value = 0;
      for (const std::uint64_t w : partial[k]) value += std::popcount(w);
      if (!have_best || value > best) {
        best = value;
        best_pick = pick;
        have_best = true;
      }
      return;
    }
    for (std::size_t i = start; i + (k - depth) <= m; ++i) {
      pick[depth] = i;
      for (std::size_t w = 0; w < width; ++w) partial[depth + 1][w] = partial[depth][w] | words[i][w];
      self(self, depth + 1, i + 1);
    }
  };
  recurse(recurse, 0, 0);

  OptResult result;
  result.value = best;
  for (const std::size_t i : best_pick) result.witness.push_back(order[i]->id);
  return result;
}

CoverageState offline_greedy(const Instance& instance) {
  CoverageState state(instance.universe_size());
  std::vector<bool> taken(instance.num_sets(), false);
  for (std::size_t round = 0; round < instance.budget(); ++round) {
    std::size_t best_gain = 0;
    std::size_t best_index = 0;
    bool found = false;
    for (std::size_t i = 0; i < instance.num_sets(); ++i) {
      if (taken[i]) continue;
      const SetRecord& record = instance.sets()[i];
      const std::size_t gain = state.covered.count_missing(record.elements);
      if (gain == 0) continue;
      const bool better = !found || gain > best_gain ||
                          (gain == best_gain && raw(record.id) < raw(instance.sets()[best_index].id));
      if (better) {
        best_gain = gain;
        best_index = i;
        found = true;
      }
    }
    if (!found) break;
    taken[best_index] = true;
    const SetRecord& pick = instance.sets()[best_index];
    state.add(pick.id, pick.elements);
  }
  return state;
}

ThresholdLadder::ThresholdLadder(std::vector<double> thresholds) : tau_(std::move(thresholds)) {
  if (tau_.empty()) throw std::invalid_argument("threshold ladder must be non-empty");
  for (std::size_t i = 0; i < tau_.size(); ++i) {
    if (!(tau_[i] > 0.0)) throw std::invalid_argument("thresholds must be positive");
    if (i > 0 && !(tau_[i] < tau_[i - 1])) {
      throw std::invalid_argument("thresholds must be strictly decreasing");
    }
  }
}

ThresholdLadder ThresholdLadder::geometric(double guess, std::size_t budget, double epsilon) {
  if (!(guess > 0.0) || budget == 0 || !(epsilon > 0.0)) {
    throw std::invalid_argument("geometric ladder needs v > 0, k >= 1, eps > 0");
  }
  const double k = static_cast<double>(budget);
  const double floor_value = guess / (4.0 * std::numbers::e * k);
  std::vector<double> tau;
  double t = 2.0 * guess / k;
  while (true) {
    tau.push_back(t);
    if (t < floor_value) break;
    t /= 1.0 + epsilon;
  }
  return ThresholdLadder(std::move(tau));
}

bool ThresholdLadder::satisfies(double v_low, std::size_t budget, double epsilon) const {
  const double k = static_cast<double>(budget);
  if (tau_.front() < v_low / k) return false;
  if (!(tau_.back() < v_low / (4.0 * std::numbers::e * k))) return false;
  for (std::size_t i = 0; i + 1 < tau_.size(); ++i) {
    if (tau_[i] / tau_[i + 1] > (1.0 + epsilon) * (1.0 + 1e-12)) return false;
  }
  return true;
}

CoverageState quantized_greedy(std::span<const SetRecord> stream, Element universe,
                               std::size_t budget, const ThresholdLadder& ladder) {
  CoverageState state(universe);
  for (const double tau : ladder.thresholds()) {
    for (const SetRecord& record : stream) {
      if (state.budget_used() >= budget) return state;
      const auto gain = static_cast<double>(state.covered.count_missing(record.elements));
      if (gain >= tau) state.add(record.id, record.elements);
    }
  }
  return state;
}

SetId assign_set_id(std::span<const Element> elements, std::uint64_t point, std::uint64_t prime) {
  const PrimeField field(prime);
  if (point >= prime) {
    throw BadField("evaluation point " + std::to_string(point) + " not in F_" + std::to_string(prime));
  }
  std::uint64_t product = 1;
  for (const Element u : elements) product = field.mul(product, field.sub(point, field.reduce(u)));
  return make_id(product);
}

void validate_stream(std::span<const StreamToken> tokens, Element universe) {
  struct Seen {
    int balance = 0;
    std::size_t insert_index = 0;
    std::size_t last_line = 0;
  };
  std::unordered_map<SetId, Seen> seen;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const StreamToken& token = tokens[i];
    const std::size_t line = i + 1;
    Seen& entry = seen[token.set.id];
    entry.last_line = line;
    if (token.op == Op::Insert) {
      if (const std::string problem = describe_record_problem(token.set, universe); !problem.empty()) {
        throw ValidationError(line, "set " + id_string(token.set.id) + ": " + problem);
      }
      if (entry.insert_index != 0 &&
          tokens[entry.insert_index - 1].set.elements != token.set.elements) {
        throw ValidationError(line, "set " + id_string(token.set.id) +
                                        " re-inserted with different contents");
      }
      if (entry.insert_index == 0) entry.insert_index = line;
      ++entry.balance;
    } else {
      if (entry.balance <= 0) {
        throw ValidationError(line, "delete of set " + id_string(token.set.id) +
                                        " which is not currently inserted");
      }
      if (!token.set.elements.empty() &&
          tokens[entry.insert_index - 1].set.elements != token.set.elements) {
        throw ValidationError(line, "delete of set " + id_string(token.set.id) +
                                        " with contents differing from its insert");
      }
      --entry.balance;
    }
  }
  // Report the earliest offending id by its last token.
  std::size_t worst_line = 0;
  SetId worst_id{};
  for (const auto& [id, entry] : seen) {
    if (entry.balance > 1 && (worst_line == 0 || entry.last_line < worst_line)) {
      worst_line = entry.last_line;
      worst_id = id;
    }
  }
  if (worst_line != 0) {
    throw ValidationError(worst_line, "set " + id_string(worst_id) +
                                          " ends with more than one net insertion");
  }
}

Instance live_instance(std::span<const StreamToken> tokens, Element universe, std::size_t budget) {
  validate_stream(tokens, universe);
  std::unordered_map<SetId, int> balance;
  std::unordered_map<SetId, const SetRecord*> content;
  std::vector<SetId> order;
  for (const StreamToken& token : tokens) {
    if (token.op == Op::Insert) {
      if (!content.contains(token.set.id)) {
        content.emplace(token.set.id, &token.set);
        order.push_back(token.set.id);
      }
      ++balance[token.set.id];
    } else {
      --balance[token.set.id];
    }
  }
  std::vector<SetRecord> sets;
  for (const SetId id : order) {
    if (balance[id] == 1) sets.push_back(*content[id]);
  }
  return Instance(universe, budget, std::move(sets));
}

ReplayableStream::ReplayableStream(std::vector<StreamToken> tokens, Element universe)
    : tokens_(std::move(tokens)), universe_(universe) {
  validate_stream(tokens_, universe_);
  std::unordered_map<SetId, std::size_t> first_insert;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    StreamToken& token = tokens_[i];
    max_id_ = std::max(max_id_, raw(token.set.id));
    if (token.op == Op::Insert) {
      first_insert.emplace(token.set.id, i);
    } else if (token.set.elements.empty()) {
      token.set.elements = tokens_[first_insert.at(token.set.id)].set.elements;
    }
  }
  distinct_ids_ = first_insert.size();
}

}  // namespace streamcov
