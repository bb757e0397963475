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

#ifndef STREAMCOV_URN_SIM_HPP_
#define STREAMCOV_URN_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "streamcov/core_model.hpp"

namespace streamcov {

enum class UrnEnd { Points, Empty };

std::string to_string(UrnEnd end);

// Decides which gold balls turn to lead besides the drawn one, and where
// lead balls go when a cascade phase ends. Balls are tracked by count only.
class UrnAdversary {
 public:
  virtual ~UrnAdversary() = default;
  virtual std::string name() const = 0;

  // Single urn, after the drawn ball became lead. Returns how many of the
  // remaining `gold` balls also turn to lead (clamped to `gold`).
  virtual std::uint64_t extra_lead(std::uint64_t gold, std::uint64_t lead, std::mt19937_64& rng) = 0;

  // Cascade, after a gold draw from urn `r` (0-based). Returns extra
  // conversions per urn; entry j is clamped to gold[j].
  virtual std::vector<std::uint64_t> cascade_extra_lead(std::size_t r, std::span<const std::uint64_t> gold,
                                                        std::span<const std::uint64_t> lead,
                                                        std::mt19937_64& rng) = 0;

  // Cascade phase end: for the `lead` balls of urn `r`, returns how many
  // move to each urn (size t, only entries above r may be nonzero). The
  // rest are destroyed.
  virtual std::vector<std::uint64_t> promote(std::size_t r, std::uint64_t lead, std::size_t urns,
                                             std::mt19937_64& rng);
};

// Only the drawn ball turns to lead; lead is destroyed at phase end.
class PassiveAdversary : public UrnAdversary {
 public:
  std::string name() const override { return "none"; }
  std::uint64_t extra_lead(std::uint64_t, std::uint64_t, std::mt19937_64&) override { return 0; }
  std::vector<std::uint64_t> cascade_extra_lead(std::size_t, std::span<const std::uint64_t> gold,
                                                std::span<const std::uint64_t>, std::mt19937_64&) override;
};

// Each remaining gold ball turns to lead independently with probability f.
class FractionAdversary : public UrnAdversary {
 public:
  explicit FractionAdversary(double fraction);
  std::string name() const override;
  std::uint64_t extra_lead(std::uint64_t gold, std::uint64_t lead, std::mt19937_64& rng) override;
  std::vector<std::uint64_t> cascade_extra_lead(std::size_t r, std::span<const std::uint64_t> gold,
                                                std::span<const std::uint64_t> lead,
                                                std::mt19937_64& rng) override;

 private:
  double fraction_;
};

// Every gold ball turns to lead on each gold draw. In a cascade, lead balls
// are promoted one urn up instead of destroyed.
class MaxDamageAdversary : public UrnAdversary {
 public:
  std::string name() const override { return "max-damage"; }
  std::uint64_t extra_lead(std::uint64_t gold, std::uint64_t, std::mt19937_64&) override { return gold; }
  std::vector<std::uint64_t> cascade_extra_lead(std::size_t r, std::span<const std::uint64_t> gold,
                                                std::span<const std::uint64_t> lead,
                                                std::mt19937_64& rng) override;
  std::vector<std::uint64_t> promote(std::size_t r, std::uint64_t lead, std::size_t urns,
                                     std::mt19937_64& rng) override;
};

// No extra conversions, but every lead ball moves up one urn at phase end.
class PromoteAllAdversary : public PassiveAdversary {
 public:
  std::string name() const override { return "promote-all"; }
  std::vector<std::uint64_t> promote(std::size_t r, std::uint64_t lead, std::size_t urns,
                                     std::mt19937_64& rng) override;
};

// Replays a recorded sequence of demotion fractions: the j-th gold draw
// converts round(f_j * gold) further balls. Past the end of the script
// nothing extra converts.
class ScriptedAdversary : public UrnAdversary {
 public:
  explicit ScriptedAdversary(std::vector<double> fractions, std::string name = "threshold-mimic");
  std::string name() const override { return name_; }
  std::uint64_t extra_lead(std::uint64_t gold, std::uint64_t lead, std::mt19937_64& rng) override;
  std::vector<std::uint64_t> cascade_extra_lead(std::size_t r, std::span<const std::uint64_t> gold,
                                                std::span<const std::uint64_t> lead,
                                                std::mt19937_64& rng) override;
  std::size_t consumed() const { return next_; }

 private:
  std::vector<double> fractions_;
  std::string name_;
  std::size_t next_ = 0;
};

// Demotion script from a threshold greedy run: gold sets are those with
// |S \ C| >= threshold; a random gold set is added each step and the
// fraction of the other gold sets that drop below the threshold recorded.
std::vector<double> mimic_script(const Instance& instance, double threshold, std::uint64_t seed);

// "none", "max-damage", "promote-all", "fraction:<f>".
std::unique_ptr<UrnAdversary> make_adversary(const std::string& spec);

struct UrnResult {
  std::size_t phases = 0;
  std::uint64_t points_scaled = 0;  // points * scale
  std::uint64_t scale = 1;
  UrnEnd ended_by = UrnEnd::Empty;
  std::size_t draws = 0;
  std::vector<std::uint64_t> q_trace;  // cascade only: Q after each phase

  double points() const { return static_cast<double>(points_scaled) / static_cast<double>(scale); }
};

// A single urn with a configurable draw count and point value, both scaled
// to integers: each gold draw earns `gold_value`, the process stops at
// `target`.
struct SingleUrnParams {
  std::uint64_t balls = 0;
  std::uint64_t draws_per_phase = 1;
  std::uint64_t gold_value = 1;
  std::uint64_t target = 1;
  std::uint64_t scale = 1;
};

UrnResult run_single_urn(const SingleUrnParams& params, UrnAdversary& adversary, std::mt19937_64& rng);

// d draws per phase, one point per gold draw, stops at d points.
UrnResult run_single_urn(std::uint64_t balls, std::uint64_t d, UrnAdversary& adversary, std::uint64_t seed);

// Urn r (1-based) gets 2^r draws per phase, each gold draw worth d/2^r.
// Points are kept exactly, scaled by 2^t.
UrnResult run_cascade(std::span<const std::uint64_t> balls, std::uint64_t d, UrnAdversary& adversary,
                      std::mt19937_64& rng);
UrnResult run_cascade(std::span<const std::uint64_t> balls, std::uint64_t d, UrnAdversary& adversary,
                      std::uint64_t seed);

// gamma = ln ln m / ln m, for m >= 3.
double urn_gamma(std::uint64_t m);
// ceil(12 / gamma).
std::uint64_t urn_draws(std::uint64_t m);

enum class UrnProcess { Single, Cascade };

struct UrnTrialRow {
  std::string process;
  std::string sizes;  // m, or m_1;...;m_t
  std::uint64_t d = 0;
  std::string adversary;
  std::uint64_t seed = 0;
  std::size_t phases = 0;
  double points = 0.0;
  UrnEnd ended_by = UrnEnd::Empty;
};

struct UrnSummaryRow {
  std::string process;
  std::string sizes;
  std::uint64_t d = 0;
  std::string adversary;
  std::size_t trials = 0;
  double p90_phases = 0.0;
  double mean_phases = 0.0;
  std::size_t max_phases = 0;
  double scale = 0.0;  // log m / log log m, or t + log2 m
};

struct PhaseBoundReport {
  std::vector<UrnTrialRow> trials;
  std::vector<UrnSummaryRow> summary;
};

// For each size vector and adversary spec, runs `trials` seeded trials.
// Single-urn sizes must have one entry; d = 0 selects urn_draws(m). For a
// cascade, d = 0 selects 2^t.
PhaseBoundReport phase_bound_experiment(UrnProcess process, std::span<const std::vector<std::uint64_t>> sizes,
                                        std::size_t trials, std::span<const std::string> adversaries,
                                        std::uint64_t seed, std::uint64_t d = 0);

// Nearest-rank 90th percentile.
double percentile90(std::vector<std::size_t> values);

}  // namespace streamcov

#endif  // STREAMCOV_URN_SIM_HPP_
