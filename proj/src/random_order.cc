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

#include "streamcov/random_order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "streamcov/errors.hpp"
#include "streamcov/field.hpp"

namespace streamcov {

std::size_t RandomOrderConfig::formal_alpha(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  return static_cast<std::size_t>(std::ceil(4096.0 * std::pow(epsilon, -4.0) * std::log(2.0 / epsilon)));
}

std::size_t RandomOrderConfig::formal_beta(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  return static_cast<std::size_t>(std::ceil(32.0 / (epsilon * epsilon)));
}

bool RandomOrderConfig::formal_regime() const {
  const double a = static_cast<double>(alpha);
  const double b = static_cast<double>(beta);
  return alpha >= formal_alpha(epsilon) && beta >= formal_beta(epsilon) && budget >= alpha * beta &&
         a >= 4.0 * b * b * std::log(b / 8.0);
}

std::size_t RandomOrderConfig::windows() const { return (budget + alpha - 1) / alpha; }

std::size_t RandomOrderConfig::total_groups() const { return budget * beta; }

double RandomOrderConfig::storage_cap() const {
  std::uint64_t widest = 0;
  for (std::size_t j = 0; j <= alpha; ++j) widest = std::max(widest, binomial(alpha * beta, j));
  const double b = static_cast<double>(widest);
  const double opt = 2.0 * static_cast<double>(guess);
  const double a = static_cast<double>(alpha);
  const double k = static_cast<double>(budget);
  return opt + a * b * opt + (k / a) * b * opt / k;
}

GroupBoundaries assign_groups(std::size_t num_sets, std::size_t budget, std::size_t beta,
                              std::uint64_t seed) {
  if (budget == 0 || beta == 0) throw std::invalid_argument("budget and beta must be positive");
  GroupBoundaries out;
  out.counts.assign(budget * beta, 0);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> label(0, out.counts.size() - 1);
  for (std::size_t i = 0; i < num_sets; ++i) ++out.counts[label(rng)];
  return out;
}

RandomOrderState::RandomOrderState(Element universe, std::size_t budget, std::uint64_t guess)
    : solution_(universe), budget_(budget), guess_(guess) {}

void RandomOrderState::choose(SetId id, std::span<const Element> elements) {
  if (!chosen_.insert(id).second) return;
  ledger_.retain(solution_.add(id, elements));
}

bool RandomOrderState::reserve_set(SetId id, std::span<const Element> elements) {
  if (chosen_.contains(id) || reserved_.contains(id)) return false;
  std::vector<Element> residual = solution_.covered.missing(elements);
  if (residual.empty()) return false;
  max_residual_at_insert_ = std::max(max_residual_at_insert_, residual.size());
  reserved_.insert(id);
  reserve_.push_back({id, std::make_shared<const StoredElements>(ledger_, std::move(residual))});
  return true;
}

void RandomOrderState::trim_reserve() {
  std::vector<ReserveEntry> kept;
  kept.reserve(reserve_.size());
  for (ReserveEntry& entry : reserve_) {
    if (chosen_.contains(entry.id)) {
      reserved_.erase(entry.id);
      continue;
    }
    const std::size_t left = solution_.covered.count_missing(entry.residual->elements());
    if (left == 0) {
      reserved_.erase(entry.id);
      continue;
    }
    if (left < entry.residual->size()) {
      entry.residual = std::make_shared<const StoredElements>(
          ledger_, solution_.covered.missing(entry.residual->elements()));
    }
    kept.push_back(std::move(entry));
  }
  reserve_ = std::move(kept);
}

ReserveEntry RandomOrderState::take_reserve(std::size_t index) {
  ReserveEntry out = std::move(reserve_.at(index));
  reserve_.erase(reserve_.begin() + static_cast<std::ptrdiff_t>(index));
  reserved_.erase(out.id);
  return out;
}

void RandomOrderState::clear_reserve() {
  reserve_.clear();
  reserved_.clear();
}

std::size_t RandomOrderState::reserve_elements() const {
  std::size_t total = 0;
  for (const ReserveEntry& entry : reserve_) total += entry.residual->size();
  return total;
}

std::size_t RandomOrderState::recount_state() const {
  return solution_.coverage() + reserve_elements();
}

namespace {

// Elements of `residual` outside both C and the sorted list `added`.
std::size_t fresh_count(std::span<const Element> residual, const ElementSet& covered,
                        const std::vector<Element>& added) {
  std::size_t n = 0;
  for (Element e : residual) {
    if (!covered.contains(e) && !std::binary_search(added.begin(), added.end(), e)) ++n;
  }
  return n;
}

void merge_fresh(std::span<const Element> residual, const ElementSet& covered,
                 std::vector<Element>& added) {
  std::vector<Element> fresh;
  for (Element e : residual) {
    if (!covered.contains(e) && !std::binary_search(added.begin(), added.end(), e)) fresh.push_back(e);
  }
  std::vector<Element> merged;
  merged.reserve(added.size() + fresh.size());
  std::merge(added.begin(), added.end(), fresh.begin(), fresh.end(), std::back_inserter(merged));
  added = std::move(merged);
}

bool better(std::size_t gain, SetId id, std::size_t best_gain, SetId best_id, bool have_best) {
  if (!have_best) return true;
  if (gain != best_gain) return gain > best_gain;
  return raw(id) < raw(best_id);
}

}  // namespace

std::vector<GreedyPick> greedy_sequence(const ElementSet& covered, std::span<const SetRecord> reserve,
                                        std::span<const std::vector<SetRecord>> groups,
                                        const std::unordered_set<SetId>& excluded) {
  std::vector<GreedyPick> picks;
  std::vector<Element> added;
  for (const std::vector<SetRecord>& group : groups) {
    const SetRecord* best = nullptr;
    std::size_t best_gain = 0;
    auto consider = [&](const SetRecord& set) {
      if (excluded.contains(set.id)) return;
      const std::size_t gain = fresh_count(set.elements, covered, added);
      if (gain == 0) return;
      if (best == nullptr || better(gain, set.id, best_gain, best->id, true)) {
        best = &set;
        best_gain = gain;
      }
    };
    for (const SetRecord& set : reserve) consider(set);
    for (const SetRecord& set : group) consider(set);
    if (best == nullptr) {
      picks.push_back({});
      continue;
    }
    picks.push_back({best->id, best_gain});
    merge_fresh(best->elements, covered, added);
  }
  return picks;
}

struct WindowProcessor::Builder {
  std::vector<std::size_t> subset;
  std::vector<GreedyPick> picks;
  std::vector<std::shared_ptr<const StoredElements>> residuals;  // per non-null pick
  std::vector<Element> added;
  std::shared_ptr<const StoredElements> best;
  SetId best_id{};
  std::size_t best_gain = 0;
};

WindowProcessor::WindowProcessor(RandomOrderState& state, std::size_t groups_in_window, std::size_t k_plus)
    : state_(state), k_plus_(k_plus), builders_by_group_(groups_in_window) {
  if (k_plus == 0 || k_plus > groups_in_window) throw std::invalid_argument("k+ must lie in [1, window size]");
  std::vector<std::size_t> subset(k_plus);
  for (std::size_t i = 0; i < k_plus; ++i) subset[i] = i;
  while (true) {
    const std::size_t index = builders_.size();
    builders_.push_back({});
    builders_.back().subset = subset;
    for (std::size_t g : subset) builders_by_group_[g].push_back(index);
    std::size_t i = k_plus;
    while (i > 0 && subset[i - 1] == groups_in_window - k_plus + i - 1) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (std::size_t j = i; j < k_plus; ++j) subset[j] = subset[j - 1] + 1;
  }
}

WindowProcessor::~WindowProcessor() = default;

void WindowProcessor::begin_group(std::size_t position) {
  if (position >= builders_by_group_.size()) throw std::out_of_range("group position outside the window");
  current_ = position;
}

void WindowProcessor::offer(const SetRecord& set) {
  if (state_.chosen(set.id)) return;
  const ElementSet& covered = state_.solution().covered;
  std::shared_ptr<const StoredElements> residual;
  for (std::size_t index : builders_by_group_[current_]) {
    Builder& b = builders_[index];
    if (!residual) residual = std::make_shared<const StoredElements>(state_.ledger(), covered.missing(set.elements));
    const std::size_t gain = fresh_count(residual->elements(), covered, b.added);
    if (gain == 0 || !better(gain, set.id, b.best_gain, b.best_id, b.best != nullptr)) continue;
    b.best = residual;
    b.best_id = set.id;
    b.best_gain = gain;
  }
}

void WindowProcessor::end_group() {
  const ElementSet& covered = state_.solution().covered;
  for (std::size_t index : builders_by_group_[current_]) {
    Builder& b = builders_[index];
    for (const ReserveEntry& entry : state_.reserve()) {
      const std::size_t gain = fresh_count(entry.residual->elements(), covered, b.added);
      if (gain == 0 || !better(gain, entry.id, b.best_gain, b.best_id, b.best != nullptr)) continue;
      b.best = entry.residual;
      b.best_id = entry.id;
      b.best_gain = gain;
    }
    if (!b.best) {
      b.picks.push_back({});
      continue;
    }
    b.picks.push_back({b.best_id, b.best_gain});
    merge_fresh(b.best->elements(), covered, b.added);
    b.residuals.push_back(std::move(b.best));
    b.best.reset();
    b.best_gain = 0;
  }
}

std::size_t WindowProcessor::retained_elements() const {
  std::unordered_set<const StoredElements*> seen;
  for (const ReserveEntry& entry : state_.reserve()) seen.insert(entry.residual.get());
  std::size_t total = 0;
  auto count = [&](const std::shared_ptr<const StoredElements>& p) {
    if (p && seen.insert(p.get()).second) total += p->size();
  };
  for (const Builder& b : builders_) {
    for (const auto& p : b.residuals) count(p);
    count(b.best);
  }
  return total;
}

WindowOutcome WindowProcessor::finish() {
  WindowOutcome out;
  out.k_plus = k_plus_;
  out.subsets_scored = builders_.size();
  const std::size_t base = state_.solution().coverage();
  const Builder* winner = nullptr;
  for (const Builder& b : builders_) {
    if (winner == nullptr || b.added.size() > winner->added.size()) winner = &b;
  }
  out.best_subset = winner->subset;
  out.best_sequence = winner->picks;
  out.best_score = base + winner->added.size();

  std::size_t r = 0;
  for (const GreedyPick& pick : winner->picks) {
    if (pick.id) state_.choose(*pick.id, winner->residuals[r++]->elements());
  }
  for (const Builder& b : builders_) {
    r = 0;
    for (const GreedyPick& pick : b.picks) {
      if (!pick.id) continue;
      if (state_.reserve_set(*pick.id, b.residuals[r]->elements())) ++out.added_to_reserve;
      ++r;
    }
  }
  state_.trim_reserve();
  builders_.clear();
  return out;
}

WindowOutcome process_window(RandomOrderState& state, std::span<const std::vector<SetRecord>> window_groups) {
  const std::size_t k_plus = std::min(window_groups.size(), state.budget() - state.budget_used());
  if (k_plus == 0) return {};
  WindowProcessor processor(state, window_groups.size(), k_plus);
  for (std::size_t g = 0; g < window_groups.size(); ++g) {
    processor.begin_group(g);
    for (const SetRecord& set : window_groups[g]) processor.offer(set);
    processor.end_group();
  }
  return processor.finish();
}

std::vector<SetId> drain_reserve(RandomOrderState& state, std::mt19937_64& rng) {
  std::vector<SetId> drained;
  const std::uint64_t v = state.guess();
  const std::uint64_t k = state.budget();
  while (state.budget_used() < state.budget()) {
    std::vector<std::size_t> qualifying;
    const auto reserve = state.reserve();
    for (std::size_t i = 0; i < reserve.size(); ++i) {
      const std::uint64_t left = state.solution().covered.count_missing(reserve[i].residual->elements());
      if (left * k >= v) qualifying.push_back(i);
    }
    if (qualifying.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, qualifying.size() - 1);
    ReserveEntry entry = state.take_reserve(qualifying[pick(rng)]);
    state.choose(entry.id, entry.residual->elements());
    drained.push_back(entry.id);
    state.trim_reserve();
  }
  return drained;
}

RandomOrderResult run_random_order(std::span<const SetRecord> stream, Element universe,
                                   const RandomOrderConfig& config,
                                   const std::function<void(const WindowAudit&)>& observer) {
  if (config.budget == 0 || config.alpha == 0 || config.beta == 0 || config.guess == 0) {
    throw std::invalid_argument("k, alpha, beta and v must be positive");
  }
  RandomOrderState state(universe, config.budget, config.guess);
  MetricsLedger& ledger = state.ledger();
  ledger.set_debug(config.debug_ledger);
  ledger.echo("algorithm", "random_order");
  ledger.echo("alpha", std::to_string(config.alpha));
  ledger.echo("beta", std::to_string(config.beta));
  ledger.echo("guess", std::to_string(config.guess));
  ledger.echo("guarantee", config.formal_regime() ? "formal" : "none");

  const GroupBoundaries groups = assign_groups(stream.size(), config.budget, config.beta, mix_seed(config.seed, 1));
  std::mt19937_64 rng(mix_seed(config.seed, 2));
  const double cap = config.storage_cap();
  const std::size_t window_size = config.alpha * config.beta;

  RandomOrderResult result;
  result.formal_regime = config.formal_regime();
  ledger.count_pass();
  std::size_t pos = 0;
  auto next = [&]() -> const SetRecord& {
    if (pos >= stream.size()) throw std::logic_error("group counts exceed the stream length");
    ++result.sets_read;
    return stream[pos++];
  };
  auto check_cap = [&] {
    if (static_cast<double>(ledger.peak_stored_elements()) > cap) {
      throw BudgetExceeded("stored " + std::to_string(ledger.peak_stored_elements()) +
                           " elements, above the cap " + std::to_string(cap));
    }
  };

  for (std::size_t w = 0; w < config.windows(); ++w) {
    const std::size_t k_plus = std::min(config.alpha, config.budget - state.budget_used());
    std::optional<WindowProcessor> processor;
    if (k_plus > 0) processor.emplace(state, window_size, k_plus);

    WindowAudit audit;
    if (observer) {
      audit.window = w;
      audit.k_plus = k_plus;
      audit.covered_before = state.solution().covered;
      for (SetId id : state.solution().chosen) audit.chosen_before.insert(id);
      for (const ReserveEntry& entry : state.reserve()) {
        const auto e = entry.residual->elements();
        audit.reserve_before.push_back({entry.id, {e.begin(), e.end()}});
      }
      audit.groups.resize(window_size);
    }

    for (std::size_t g = 0; g < window_size; ++g) {
      const std::size_t global = w * window_size + g;
      const std::size_t count = global < groups.counts.size() ? groups.counts[global] : 0;
      if (processor) processor->begin_group(g);
      for (std::size_t c = 0; c < count; ++c) {
        const SetRecord& set = next();
        if (processor) processor->offer(set);
        if (observer) audit.groups[g].push_back(set);
      }
      if (processor) {
        processor->end_group();
        if (ledger.debug()) ledger.audit(state.recount_state() + processor->retained_elements());
      }
    }
    check_cap();

    if (processor) {
      audit.outcome = processor->finish();
      processor.reset();
      audit.drained = drain_reserve(state, rng);
      ++result.windows_processed;
    }
    if (state.budget_used() >= state.budget()) state.clear_reserve();
    if (state.reserve_elements() > state.reserve().size() * state.max_residual_at_insert()) {
      throw BudgetExceeded("reserve holds more than |R| times the largest inserted residual");
    }
    if (ledger.debug()) ledger.audit(state.recount_state());
    check_cap();
    if (observer) observer(audit);
  }
  while (pos < stream.size()) next();

  result.solution = state.solution();
  result.reserve_size = state.reserve().size();
  ledger.set_coverage(state.solution().coverage());
  ledger.echo("windows", std::to_string(result.windows_processed));
  ledger.echo("reserve_size", std::to_string(result.reserve_size));
  result.ledger = ledger;
  return result;
}

}  // namespace streamcov
