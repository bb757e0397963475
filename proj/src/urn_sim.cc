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

#include "streamcov/urn_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "streamcov/field.hpp"

namespace streamcov {

std::string to_string(UrnEnd end) { return end == UrnEnd::Points ? "points" : "empty"; }

std::vector<std::uint64_t> UrnAdversary::promote(std::size_t, std::uint64_t, std::size_t urns, std::mt19937_64&) {
  return std::vector<std::uint64_t>(urns, 0);
}

std::vector<std::uint64_t> PassiveAdversary::cascade_extra_lead(std::size_t, std::span<const std::uint64_t> gold,
                                                                std::span<const std::uint64_t>, std::mt19937_64&) {
  return std::vector<std::uint64_t>(gold.size(), 0);
}

FractionAdversary::FractionAdversary(double fraction) : fraction_(fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("fraction must lie in [0, 1]");
}

std::string FractionAdversary::name() const {
  std::ostringstream out;
  out << "fraction:" << fraction_;
  return out.str();
}

std::uint64_t FractionAdversary::extra_lead(std::uint64_t gold, std::uint64_t, std::mt19937_64& rng) {
  if (gold == 0) return 0;
  std::binomial_distribution<std::uint64_t> convert(gold, fraction_);
  return convert(rng);
}

std::vector<std::uint64_t> FractionAdversary::cascade_extra_lead(std::size_t, std::span<const std::uint64_t> gold,
                                                                 std::span<const std::uint64_t> lead,
                                                                 std::mt19937_64& rng) {
  std::vector<std::uint64_t> out(gold.size());
  for (std::size_t j = 0; j < gold.size(); ++j) out[j] = extra_lead(gold[j], lead[j], rng);
  return out;
}

std::vector<std::uint64_t> MaxDamageAdversary::cascade_extra_lead(std::size_t, std::span<const std::uint64_t> gold,
                                                                  std::span<const std::uint64_t>,
                                                                  std::mt19937_64&) {
  return {gold.begin(), gold.end()};
}

std::vector<std::uint64_t> MaxDamageAdversary::promote(std::size_t r, std::uint64_t lead, std::size_t urns,
                                                       std::mt19937_64&) {
  std::vector<std::uint64_t> out(urns, 0);
  if (r + 1 < urns) out[r + 1] = lead;
  return out;
}

std::vector<std::uint64_t> PromoteAllAdversary::promote(std::size_t r, std::uint64_t lead, std::size_t urns,
                                                        std::mt19937_64&) {
  std::vector<std::uint64_t> out(urns, 0);
  if (r + 1 < urns) out[r + 1] = lead;
  return out;
}

ScriptedAdversary::ScriptedAdversary(std::vector<double> fractions, std::string name)
    : fractions_(std::move(fractions)), name_(std::move(name)) {
  for (double f : fractions_) {
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("script fractions must lie in [0, 1]");
  }
}

std::uint64_t ScriptedAdversary::extra_lead(std::uint64_t gold, std::uint64_t, std::mt19937_64&) {
  if (next_ >= fractions_.size()) return 0;
  const double f = fractions_[next_++];
  return static_cast<std::uint64_t>(std::llround(f * static_cast<double>(gold)));
}

std::vector<std::uint64_t> ScriptedAdversary::cascade_extra_lead(std::size_t, std::span<const std::uint64_t> gold,
                                                                 std::span<const std::uint64_t>,
                                                                 std::mt19937_64&) {
  std::vector<std::uint64_t> out(gold.size(), 0);
  if (next_ >= fractions_.size()) return out;
  const double f = fractions_[next_++];
  for (std::size_t j = 0; j < gold.size(); ++j) {
    out[j] = static_cast<std::uint64_t>(std::llround(f * static_cast<double>(gold[j])));
  }
  return out;
}

std::vector<double> mimic_script(const Instance& instance, double threshold, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ElementSet covered(instance.universe_size());
  auto gold_sets = [&] {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < instance.sets().size(); ++i) {
      if (static_cast<double>(covered.count_missing(instance.sets()[i].elements)) >= threshold) out.push_back(i);
    }
    return out;
  };
  std::vector<double> script;
  std::vector<std::size_t> gold = gold_sets();
  while (!gold.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, gold.size() - 1);
    const std::size_t chosen = gold[pick(rng)];
    covered.insert_all(instance.sets()[chosen].elements);
    const std::vector<std::size_t> after = gold_sets();
    const std::size_t others = gold.size() - 1;
    // The chosen set itself is always demoted once its elements are covered.
    const std::size_t demoted = gold.size() - after.size() - 1;
    script.push_back(others == 0 ? 0.0 : static_cast<double>(demoted) / static_cast<double>(others));
    gold = after;
  }
  return script;
}

std::unique_ptr<UrnAdversary> make_adversary(const std::string& spec) {
  if (spec == "none") return std::make_unique<PassiveAdversary>();
  if (spec == "max-damage") return std::make_unique<MaxDamageAdversary>();
  if (spec == "promote-all") return std::make_unique<PromoteAllAdversary>();
  const std::string prefix = "fraction:";
  if (spec.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    const std::string tail = spec.substr(prefix.size());
    double f = 0.0;
    try {
      f = std::stod(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tail.size()) throw std::invalid_argument("bad adversary fraction: " + spec);
    return std::make_unique<FractionAdversary>(f);
  }
  throw std::invalid_argument("unknown adversary: " + spec);
}

namespace {

// True with probability gold / (gold + lead), one uniform draw per call.
bool draw_gold(std::uint64_t gold, std::uint64_t lead, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> ball(0, gold + lead - 1);
  return ball(rng) < gold;
}

}  // namespace

UrnResult run_single_urn(const SingleUrnParams& params, UrnAdversary& adversary, std::mt19937_64& rng) {
  if (params.draws_per_phase == 0 || params.target == 0 || params.scale == 0) {
    throw std::invalid_argument("draws, target and scale must be positive");
  }
  UrnResult out;
  out.scale = params.scale;
  std::uint64_t gold = params.balls;
  std::uint64_t lead = 0;
  while (true) {
    if (gold + lead == 0) {
      out.ended_by = UrnEnd::Empty;
      return out;
    }
    ++out.phases;
    for (std::uint64_t i = 0; i < params.draws_per_phase; ++i) {
      ++out.draws;
      if (!draw_gold(gold, lead, rng)) continue;
      --gold;
      ++lead;
      out.points_scaled += params.gold_value;
      const std::uint64_t extra = std::min(gold, adversary.extra_lead(gold, lead, rng));
      gold -= extra;
      lead += extra;
      if (out.points_scaled >= params.target) {
        out.ended_by = UrnEnd::Points;
        return out;
      }
    }
    lead = 0;
  }
}

UrnResult run_single_urn(std::uint64_t balls, std::uint64_t d, UrnAdversary& adversary, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return run_single_urn(SingleUrnParams{balls, d, 1, d, 1}, adversary, rng);
}

UrnResult run_cascade(std::span<const std::uint64_t> balls, std::uint64_t d, UrnAdversary& adversary,
                      std::mt19937_64& rng) {
  const std::size_t t = balls.size();
  if (t == 0 || d == 0) throw std::invalid_argument("cascade needs t >= 1 and d >= 1");
  if (t >= 62 || d > (std::uint64_t{1} << (62 - t))) throw std::invalid_argument("d * 2^t overflows");
  UrnResult out;
  out.scale = std::uint64_t{1} << t;
  const std::uint64_t target = d << t;
  std::vector<std::uint64_t> gold(balls.begin(), balls.end());
  std::vector<std::uint64_t> lead(t, 0);
  auto total = [&] {
    std::uint64_t sum = 0;
    for (std::size_t r = 0; r < t; ++r) sum += gold[r] + lead[r];
    return sum;
  };
  while (true) {
    if (total() == 0) {
      out.ended_by = UrnEnd::Empty;
      return out;
    }
    ++out.phases;
    for (std::size_t r = 0; r < t; ++r) {
      const std::uint64_t draws = std::uint64_t{2} << r;
      for (std::uint64_t i = 0; i < draws; ++i) {
        if (gold[r] + lead[r] == 0) break;
        ++out.draws;
        if (!draw_gold(gold[r], lead[r], rng)) continue;
        --gold[r];
        ++lead[r];
        out.points_scaled += d << (t - r - 1);
        const std::vector<std::uint64_t> extra = adversary.cascade_extra_lead(r, gold, lead, rng);
        for (std::size_t j = 0; j < t && j < extra.size(); ++j) {
          const std::uint64_t x = std::min(gold[j], extra[j]);
          gold[j] -= x;
          lead[j] += x;
        }
        if (out.points_scaled >= target) {
          out.ended_by = UrnEnd::Points;
          return out;
        }
      }
    }
    std::vector<std::uint64_t> promoted(t, 0);
    for (std::size_t r = 0; r < t; ++r) {
      if (lead[r] == 0) continue;
      const std::vector<std::uint64_t> moves = adversary.promote(r, lead[r], t, rng);
      std::uint64_t moved = 0;
      for (std::size_t j = r + 1; j < t && j < moves.size(); ++j) {
        const std::uint64_t x = std::min(moves[j], lead[r] - moved);
        promoted[j] += x;
        moved += x;
      }
      lead[r] = 0;
    }
    std::uint64_t q = 0;
    for (std::size_t r = 0; r < t; ++r) {
      gold[r] += promoted[r];
      q += gold[r] << (t - r - 1);
    }
    out.q_trace.push_back(q);
  }
}

UrnResult run_cascade(std::span<const std::uint64_t> balls, std::uint64_t d, UrnAdversary& adversary,
                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return run_cascade(balls, d, adversary, rng);
}

double urn_gamma(std::uint64_t m) {
  if (m < 3) throw std::invalid_argument("gamma needs m >= 3");
  const double ln_m = std::log(static_cast<double>(m));
  return std::log(ln_m) / ln_m;
}

std::uint64_t urn_draws(std::uint64_t m) {
  return static_cast<std::uint64_t>(std::ceil(12.0 / urn_gamma(m)));
}

double percentile90(std::vector<std::size_t> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t rank = (9 * values.size() + 9) / 10;  // ceil(0.9 n)
  return static_cast<double>(values[rank - 1]);
}

PhaseBoundReport phase_bound_experiment(UrnProcess process, std::span<const std::vector<std::uint64_t>> sizes,
                                        std::size_t trials, std::span<const std::string> adversaries,
                                        std::uint64_t seed, std::uint64_t d) {
  if (trials < 100) throw std::invalid_argument("phase bound experiments need at least 100 trials");
  PhaseBoundReport report;
  const std::string process_name = process == UrnProcess::Single ? "single" : "cascade";
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const std::vector<std::uint64_t>& m = sizes[s];
    if (m.empty() || (process == UrnProcess::Single && m.size() != 1)) {
      throw std::invalid_argument("bad urn sizes");
    }
    std::ostringstream label;
    for (std::size_t r = 0; r < m.size(); ++r) label << (r ? ";" : "") << m[r];
    const std::uint64_t total = std::accumulate(m.begin(), m.end(), std::uint64_t{0});
    std::uint64_t draws = d;
    double scale = 0.0;
    if (process == UrnProcess::Single) {
      if (draws == 0) draws = urn_draws(total);
      scale = 1.0 / urn_gamma(std::max<std::uint64_t>(total, 3));
    } else {
      if (draws == 0) draws = std::uint64_t{1} << m.size();
      scale = static_cast<double>(m.size()) + std::log2(static_cast<double>(std::max<std::uint64_t>(total, 2)));
    }
    for (std::size_t a = 0; a < adversaries.size(); ++a) {
      std::vector<std::size_t> phases;
      std::string adversary_name;
      for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::uint64_t trial_seed = mix_seed(mix_seed(mix_seed(seed, s), a), trial);
        std::unique_ptr<UrnAdversary> adversary = make_adversary(adversaries[a]);
        adversary_name = adversary->name();
        const UrnResult r = process == UrnProcess::Single ? run_single_urn(total, draws, *adversary, trial_seed)
                                                          : run_cascade(m, draws, *adversary, trial_seed);
        phases.push_back(r.phases);
        report.trials.push_back(
            {process_name, label.str(), draws, adversary_name, trial_seed, r.phases, r.points(), r.ended_by});
      }
      UrnSummaryRow row;
      row.process = process_name;
      row.sizes = label.str();
      row.d = draws;
      row.adversary = adversary_name;
      row.trials = trials;
      row.p90_phases = percentile90(phases);
      row.mean_phases = static_cast<double>(std::accumulate(phases.begin(), phases.end(), std::size_t{0})) /
                        static_cast<double>(trials);
      row.max_phases = *std::max_element(phases.begin(), phases.end());
      row.scale = scale;
      report.summary.push_back(row);
    }
  }
  return report;
}

}  // namespace streamcov
