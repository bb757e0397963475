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

#include "streamcov/dynamic_maxcov.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>

#include "streamcov/errors.hpp"
#include "streamcov/field.hpp"
#include "streamcov/l0_sampling.hpp"

namespace streamcov {

std::size_t tail_levels(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  return 1 + static_cast<std::size_t>(std::ceil(std::log(16.0 * std::numbers::e) / std::log1p(epsilon)));
}

std::size_t default_pass_cap(double epsilon, std::size_t num_sets) {
  const double m = static_cast<double>(std::max<std::size_t>(num_sets, 4));
  const double log_m = std::log2(m);
  return static_cast<std::size_t>(std::ceil(20.0 * (1.0 + 1.0 / (epsilon * std::log2(log_m))) * log_m));
}

std::size_t DynamicConfig::ell() const {
  return static_cast<std::size_t>(std::bit_width(budget)) - 1;
}

std::vector<double> DynamicConfig::theta() const {
  std::vector<double> theta{kUnbounded};
  const double two_v = 2.0 * static_cast<double>(guess);
  for (std::size_t i = 1; i <= ell(); ++i) theta.push_back(std::ldexp(two_v, -static_cast<int>(i)));
  return theta;
}

std::vector<double> DynamicConfig::tau() const {
  std::vector<double> tau{kUnbounded};
  const double top = std::ldexp(2.0 * static_cast<double>(guess), -static_cast<int>(ell()));
  const std::size_t levels = tail_levels(epsilon);
  for (std::size_t i = 1; i <= levels; ++i) tau.push_back(top / std::pow(1.0 + epsilon, static_cast<double>(i - 1)));
  return tau;
}

GrowOutcome grow_solution(CoverageState& state, std::size_t budget, SetId id,
                          std::span<const Element> residual, double threshold, MetricsLedger* ledger) {
  if (state.budget_used() >= budget) return GrowOutcome::BudgetFull;
  const auto gain = static_cast<double>(state.covered.count_missing(residual));
  if (gain < threshold) return GrowOutcome::Skipped;
  const std::size_t added = state.add(id, residual);
  if (ledger != nullptr) ledger->retain(added);
  return GrowOutcome::Grew;
}

namespace {

struct Band {
  double lo;
  double hi;
  std::size_t draws;  // also the sampler's r
  bool cascade;
  std::size_t level;  // i of F_i or G_i
};

// Samplers and emptiness sketches built by one sampling pass.
struct SamplingPass {
  std::vector<Band> bands;
  std::vector<std::optional<BatchSampler>> samplers;
  std::vector<std::optional<L0Sketch>> emptiness;
  std::int64_t oversized_live = 0;

  bool empty(std::size_t b) const {
    return !emptiness[b] || emptiness[b]->query().status == SampleStatus::Empty;
  }
};

class Estimator {
 public:
  Estimator(ReplayableStream& stream, const DynamicConfig& config)
      : stream_(stream),
        config_(config),
        theta_(config.theta()),
        tau_(config.tau()),
        pass_cap_(config.pass_cap != 0 ? config.pass_cap
                                       : default_pass_cap(config.epsilon, stream.distinct_ids())),
        params_{stream.max_id() + 1,
                config.delta > 0.0 ? config.delta : default_delta(stream.distinct_ids()), config.seed} {
    result_.guess = config.guess;
    result_.solution = CoverageState(stream.universe());
    result_.trace.tail_iterations.assign(tau_.size(), 0);
    result_.ledger.set_debug(config.debug_ledger);
    result_.ledger.echo("k", std::to_string(config.budget));
    result_.ledger.echo("epsilon", std::to_string(config.epsilon));
    result_.ledger.echo("v", std::to_string(config.guess));
    result_.ledger.echo("delta", std::to_string(params_.delta));
    result_.ledger.echo("seed", std::to_string(config.seed));
    result_.ledger.echo("pass_cap", std::to_string(pass_cap_));
  }

  DynamicResult run() {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t ell = config_.ell();
    DynamicPhase phase = ell >= 1 ? DynamicPhase::Cascade : DynamicPhase::Tail;
    std::size_t level = 1;

    while (phase != DynamicPhase::Done) {
      bool retried = false;
      while (true) {
        SamplingPass pass = sampling_pass(phase, level);
        if (pass.oversized_live > 0) {
          result_.trace.guess_rejected = true;
          ++result_.trace.terminal_passes;
          phase = DynamicPhase::Done;
          break;
        }
        std::vector<std::size_t> active;
        if (phase == DynamicPhase::Cascade) {
          for (std::size_t b = 0; b < pass.bands.size(); ++b) {
            if (pass.bands[b].cascade && !pass.empty(b)) active.push_back(b);
          }
          if (active.empty()) phase = DynamicPhase::Tail;
        }
        if (phase == DynamicPhase::Tail) {
          for (std::size_t b = 0; b < pass.bands.size(); ++b) {
            if (!pass.bands[b].cascade && pass.bands[b].level >= level && !pass.empty(b)) {
              active.push_back(b);
              level = pass.bands[b].level;
              break;
            }
          }
          if (active.empty()) {
            ++result_.trace.terminal_passes;
            phase = DynamicPhase::Done;
            break;
          }
        }
        try {
          iterate(pass, active, phase, level);
          break;
        } catch (const SketchFailure&) {
          if (retried) throw;
        } catch (const EmptySupport&) {
          if (retried) throw SketchFailure("band reported non-empty but sampler support is empty");
        }
        retried = true;
        ++result_.trace.retry_passes;
      }
      if (result_.solution.budget_used() >= config_.budget) phase = DynamicPhase::Done;
    }

    result_.ledger.set_passes(passes_);
    result_.ledger.set_coverage(result_.solution.coverage());
    result_.ledger.set_wall_time_ms(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
    return std::move(result_);
  }

 private:
  void begin_pass() {
    if (passes_ + 1 > pass_cap_) {
      throw PassCapExceeded("pass cap " + std::to_string(pass_cap_) + " reached");
    }
    ++passes_;
  }

  std::vector<Band> bands_for(DynamicPhase phase, std::size_t level) const {
    std::vector<Band> bands;
    const std::size_t ell = config_.ell();
    if (phase == DynamicPhase::Cascade) {
      for (std::size_t i = 1; i <= ell; ++i) {
        bands.push_back(Band{theta_[i], theta_[i - 1], std::size_t{1} << i, true, i});
      }
      // G_1 = [tau_1, inf) coincides with the union of the cascade bands.
      level = 2;
    }
    for (std::size_t i = std::max<std::size_t>(level, 1); i < tau_.size(); ++i) {
      bands.push_back(Band{tau_[i], tau_[i - 1], config_.budget, false, i});
    }
    return bands;
  }

  SamplingPass sampling_pass(DynamicPhase phase, std::size_t level) {
    begin_pass();
    SamplingPass pass;
    pass.bands = bands_for(phase, level);
    pass.samplers.resize(pass.bands.size());
    pass.emptiness.resize(pass.bands.size());
    const std::uint64_t pass_seed = mix_seed(config_.seed, passes_);
    const double oversize = 2.0 * static_cast<double>(config_.guess);
    const ElementSet& covered = result_.solution.covered;

    stream_.replay([&](const StreamToken& token) {
      const int delta = token.op == Op::Insert ? 1 : -1;
      const auto residual = static_cast<double>(covered.count_missing(token.set.elements));
      if (residual > oversize) pass.oversized_live += delta;
      for (std::size_t b = 0; b < pass.bands.size(); ++b) {
        const Band& band = pass.bands[b];
        if (residual < band.lo || residual >= band.hi) continue;
        if (!pass.samplers[b]) {
          SamplerParams params = params_;
          params.seed = mix_seed(pass_seed, 2 * b);
          pass.samplers[b].emplace(band.draws, params);
          pass.emptiness[b].emplace(params_.id_space, params_.delta, mix_seed(pass_seed, 2 * b + 1));
        }
        pass.samplers[b]->update(token.set.id, delta);
        pass.emptiness[b]->update(token.set.id, delta);
        break;
      }
    });

    std::size_t words = 0;
    for (std::size_t b = 0; b < pass.bands.size(); ++b) {
      if (pass.samplers[b]) words += pass.samplers[b]->words() + pass.emptiness[b]->words();
    }
    result_.ledger.note_sketch_words(words);
    return pass;
  }

  void iterate(SamplingPass& pass, std::span<const std::size_t> active, DynamicPhase phase,
               std::size_t level) {
    std::mt19937_64 rng(mix_seed(config_.seed, 0x5eed0000ULL + passes_));
    IterationRecord record;
    record.phase = phase;
    record.level = phase == DynamicPhase::Tail ? level : 0;

    // Draws per active band, in band order (largest thresholds first).
    std::vector<std::pair<std::size_t, std::vector<SetId>>> draws;
    for (const std::size_t b : active) {
      BatchSampler& sampler = *pass.samplers[b];
      const std::size_t before = sampler.fallbacks();
      draws.emplace_back(b, sampler.draw_with_fallback(pass.bands[b].draws, rng));
      result_.trace.fallbacks += sampler.fallbacks() - before;
      record.draws += pass.bands[b].draws;
    }

    // Retrieval pass: store S \ C for every sampled id.
    std::unordered_map<SetId, std::size_t> wanted;
    for (const auto& [b, ids] : draws) {
      for (const SetId id : ids) wanted.emplace(id, b);
    }
    std::unordered_map<SetId, std::unique_ptr<StoredElements>> retrieved;
    begin_pass();
    const ElementSet& covered = result_.solution.covered;
    stream_.replay([&](const StreamToken& token) {
      if (token.op != Op::Insert) return;
      const auto it = wanted.find(token.set.id);
      if (it == wanted.end() || retrieved.contains(token.set.id)) return;
      std::vector<Element> residual = covered.missing(token.set.elements);
      const Band& band = pass.bands[it->second];
      const auto size = static_cast<double>(residual.size());
      if (size < band.lo || size >= band.hi) ++record.band_violations;
      retrieved.emplace(token.set.id, std::make_unique<StoredElements>(result_.ledger, std::move(residual)));
    });
    record.distinct_retrieved = retrieved.size();
    for (const auto& [id, stored] : retrieved) record.retrieved_elements += stored->size();

    const double two_v = 2.0 * static_cast<double>(config_.guess);
    if (phase == DynamicPhase::Cascade) {
      record.retrieved_bound = 4 * config_.guess * config_.ell();
    } else {
      const double upper = level == 1 ? two_v : tau_[level - 1];
      record.retrieved_bound = static_cast<std::size_t>(std::floor(static_cast<double>(config_.budget) * upper));
    }
    if (result_.ledger.debug()) {
      std::size_t recount = result_.solution.coverage();
      for (const auto& [id, stored] : retrieved) recount += stored->size();
      result_.ledger.audit(recount);
    }
    if (record.retrieved_elements > record.retrieved_bound) {
      throw BudgetExceeded("retrieved " + std::to_string(record.retrieved_elements) +
                           " elements, bound " + std::to_string(record.retrieved_bound));
    }

    for (const auto& [b, ids] : draws) {
      const double threshold = pass.bands[b].lo;
      for (const SetId id : ids) {
        const auto it = retrieved.find(id);
        if (it == retrieved.end()) continue;
        const GrowOutcome outcome = grow_solution(result_.solution, config_.budget, id,
                                                  it->second->elements(), threshold, &result_.ledger);
        if (outcome == GrowOutcome::Grew) ++record.grew;
        if (outcome == GrowOutcome::BudgetFull) break;
      }
    }
    record.coverage_after = result_.solution.coverage();

    if (phase == DynamicPhase::Cascade) {
      ++result_.trace.cascade_iterations;
    } else {
      ++result_.trace.tail_iterations[level];
    }
    result_.trace.iterations.push_back(record);
  }

  ReplayableStream& stream_;
  DynamicConfig config_;
  std::vector<double> theta_;
  std::vector<double> tau_;
  std::size_t pass_cap_;
  SamplerParams params_;
  std::size_t passes_ = 0;
  DynamicResult result_;
};

}  // namespace

DynamicResult run_dynamic(ReplayableStream& stream, const DynamicConfig& config) {
  if (config.budget == 0) throw std::invalid_argument("budget must be at least 1");
  if (config.guess == 0) throw std::invalid_argument("guess must be at least 1");
  return Estimator(stream, config).run();
}

std::vector<std::uint64_t> guess_ladder(Element universe) {
  std::vector<std::uint64_t> guesses;
  const auto top = static_cast<std::size_t>(std::bit_width(std::max<Element>(universe, 1) - 1));
  for (std::size_t i = 0; i <= top; ++i) guesses.push_back(std::uint64_t{1} << i);
  return guesses;
}

GuessLadderResult run_with_guesses(ReplayableStream& stream, std::size_t budget, double epsilon,
                                   std::uint64_t seed, std::size_t pass_cap, double delta) {
  GuessLadderResult out;
  const std::vector<std::uint64_t> guesses = guess_ladder(stream.universe());
  std::size_t best = 0;
  for (std::size_t g = 0; g < guesses.size(); ++g) {
    DynamicConfig config;
    config.budget = budget;
    config.epsilon = epsilon;
    config.guess = guesses[g];
    config.pass_cap = pass_cap;
    config.delta = delta;
    config.seed = mix_seed(seed, g);
    out.runs.push_back(run_dynamic(stream, config));
    out.combined.absorb_parallel(out.runs.back().ledger);
    if (out.runs[g].solution.coverage() > out.runs[best].solution.coverage()) best = g;
  }
  out.best = out.runs[best];
  out.combined.set_coverage(out.best.solution.coverage());
  return out;
}

}  // namespace streamcov
