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

#include "streamcov/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "streamcov/core_model.hpp"
#include "streamcov/dynamic_maxcov.hpp"
#include "streamcov/errors.hpp"
#include "streamcov/field.hpp"
#include "streamcov/generator.hpp"
#include "streamcov/random_order.hpp"
#include "streamcov/stream_io.hpp"

namespace streamcov {

using nlohmann::json;

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> columns = {
      "trial", "algorithm", "seed", "n", "m", "k", "epsilon", "guess", "alpha", "beta",
      "passes", "peak_stored_elements", "sketch_words", "coverage", "opt", "ratio",
      "wall_time_ms", "windows", "reserve_size", "status", "detail"};
  return columns;
}

const std::vector<std::string>& urn_columns() {
  static const std::vector<std::string> columns = {"process", "m",      "d",      "adversary",
                                                   "seed",    "phases", "points", "ended_by"};
  return columns;
}

void write_urn_trials(std::ostream& csv, const PhaseBoundReport& report) {
  CsvWriter writer(csv, urn_columns());
  for (const UrnTrialRow& row : report.trials) {
    std::ostringstream points;
    points << row.points;
    writer.row({row.process, row.sizes, std::to_string(row.d), row.adversary, std::to_string(row.seed),
                std::to_string(row.phases), points.str(), to_string(row.ended_by)});
  }
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const BudgetExceeded*>(&e)) return "BudgetExceeded";
  if (dynamic_cast<const PassCapExceeded*>(&e)) return "PassCapExceeded";
  if (dynamic_cast<const SketchFailure*>(&e)) return "SketchFailure";
  if (dynamic_cast<const LedgerMismatch*>(&e)) return "LedgerMismatch";
  if (dynamic_cast<const GroupExhausted*>(&e)) return "GroupExhausted";
  if (dynamic_cast<const EmptySupport*>(&e)) return "EmptySupport";
  if (dynamic_cast<const InvalidProfile*>(&e)) return "InvalidProfile";
  if (dynamic_cast<const InvalidInstance*>(&e)) return "InvalidInstance";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  if (dynamic_cast<const TooLarge*>(&e)) return "TooLarge";
  if (dynamic_cast<const UnknownId*>(&e)) return "UnknownId";
  if (dynamic_cast<const BadField*>(&e)) return "BadField";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "exception";
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* text = std::getenv("STREAMCOV_SEED");
  if (text == nullptr || *text == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(text, &end, 10);
  if (*end != '\0') throw Error(std::string("STREAMCOV_SEED is not an unsigned integer: ") + text);
  return value;
}

namespace {

struct Settings {
  std::string algorithm;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> budget;
  double epsilon = 0.2;
  std::optional<std::uint64_t> guess;
  std::optional<std::uint64_t> shuffle_seed;
  std::size_t alpha = 2;
  std::size_t beta = 2;
  std::size_t pass_cap = 0;
  double delta = 0.0;
  bool debug_ledger = false;
  std::uint64_t oracle_cap = kDefaultBruteForceCap;
  std::optional<std::filesystem::path> instance_path;
  std::optional<std::filesystem::path> stream_path;
  std::optional<std::filesystem::path> certificate_path;
  std::optional<GeneratorProfile> profile;
};

struct TrialInput {
  Instance instance;
  std::vector<StreamToken> tokens;
  std::optional<Certificate> certificate;
};

struct TrialMetrics {
  std::optional<std::uint64_t> guess;
  MetricsLedger ledger;
  CoverageState solution;
  std::size_t windows = 0;
  std::size_t reserve_size = 0;
};

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Settings read_settings(const json& j, const std::filesystem::path& base) {
  Settings s;
  s.algorithm = j.at("algorithm").get<std::string>();
  s.trials = get_or<std::size_t>(j, "trials", 1);
  s.seed = get_or<std::uint64_t>(j, "seed", 0);
  if (j.contains("k")) s.budget = j.at("k").get<std::size_t>();
  s.epsilon = get_or<double>(j, "epsilon", 0.2);
  if (j.contains("guess")) s.guess = j.at("guess").get<std::uint64_t>();
  if (j.contains("shuffle_seed")) s.shuffle_seed = j.at("shuffle_seed").get<std::uint64_t>();
  s.alpha = get_or<std::size_t>(j, "alpha", 2);
  s.beta = get_or<std::size_t>(j, "beta", 2);
  s.pass_cap = get_or<std::size_t>(j, "pass_cap", 0);
  s.delta = get_or<double>(j, "delta", 0.0);
  s.debug_ledger = get_or<bool>(j, "debug_ledger", false);
  s.oracle_cap = get_or<std::uint64_t>(j, "oracle_cap", kDefaultBruteForceCap);
  auto path = [&](const char* key) -> std::optional<std::filesystem::path> {
    if (!j.contains(key)) return std::nullopt;
    std::filesystem::path p = j.at(key).get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  s.instance_path = path("instance");
  s.stream_path = path("stream");
  s.certificate_path = path("certificate");
  if (j.contains("profile")) {
    const json& p = j.at("profile");
    GeneratorProfile profile;
    profile.kind = parse_profile_kind(p.at("kind").get<std::string>());
    profile.universe = get_or<Element>(p, "n", 0);
    profile.num_sets = get_or<std::size_t>(p, "m", 0);
    profile.budget = get_or<std::size_t>(p, "k", s.budget.value_or(1));
    profile.density = get_or<double>(p, "density", 0.2);
    profile.cover = get_or<std::size_t>(p, "cover", 0);
    profile.churn = get_or<double>(p, "churn", 0.0);
    s.profile = profile;
    if (!s.budget) s.budget = profile.budget;
  }
  if (s.algorithm != "urn" && !s.profile && !s.instance_path && !s.stream_path) {
    throw Error("config needs one of 'profile', 'instance' or 'stream'");
  }
  return s;
}

std::vector<StreamToken> inserts_of(const Instance& instance) {
  std::vector<StreamToken> tokens;
  for (const SetRecord& set : instance.sets()) tokens.push_back({Op::Insert, set});
  return tokens;
}

Instance with_budget(const Instance& instance, std::size_t budget) {
  return Instance(instance.universe_size(), budget, {instance.sets().begin(), instance.sets().end()});
}

std::optional<std::size_t> exact_opt(const TrialInput& input, std::uint64_t cap) {
  const Instance& instance = input.instance;
  if (binomial(instance.num_sets(), instance.budget()) <= cap) return brute_force_opt(instance, cap).value;
  if (input.certificate) return input.certificate->value;
  return std::nullopt;
}

// The largest power of two not above opt, which lies in [opt/2, opt].
std::uint64_t oracle_guess(std::size_t opt) {
  return opt == 0 ? 1 : std::bit_floor(static_cast<std::uint64_t>(opt));
}

TrialMetrics run_algorithm(const Settings& s, const TrialInput& input, std::optional<std::size_t> opt,
                           std::uint64_t seed, std::uint64_t shuffle_seed) {
  const Instance& instance = input.instance;
  const std::size_t k = instance.budget();
  const Element n = instance.universe_size();
  TrialMetrics out;
  if (s.algorithm == "offline-greedy") {
    out.solution = offline_greedy(instance);
    return out;
  }
  std::vector<std::uint64_t> guesses;
  if (s.guess) {
    guesses = {*s.guess};
  } else if (opt && s.algorithm != "dynamic") {
    guesses = {oracle_guess(*opt)};
  } else {
    guesses = guess_ladder(n);
  }
  if (s.algorithm == "quantized") {
    for (std::uint64_t v : guesses) {
      const ThresholdLadder ladder = ThresholdLadder::geometric(static_cast<double>(v), k, s.epsilon);
      CoverageState state = quantized_greedy(instance.sets(), n, k, ladder);
      if (!out.guess || state.coverage() > out.solution.coverage()) {
        out.solution = std::move(state);
        out.guess = v;
        out.ledger = MetricsLedger();
        out.ledger.set_passes(ladder.size());
      }
    }
    return out;
  }
  if (s.algorithm == "dynamic") {
    ReplayableStream stream(input.tokens, n);
    if (s.guess) {
      DynamicConfig config;
      config.budget = k;
      config.epsilon = s.epsilon;
      config.guess = *s.guess;
      config.pass_cap = s.pass_cap;
      config.seed = seed;
      config.delta = s.delta;
      config.debug_ledger = s.debug_ledger;
      DynamicResult r = run_dynamic(stream, config);
      out.solution = std::move(r.solution);
      out.ledger = std::move(r.ledger);
      out.guess = r.guess;
    } else {
      GuessLadderResult r = run_with_guesses(stream, k, s.epsilon, seed, s.pass_cap, s.delta);
      out.solution = std::move(r.best.solution);
      out.ledger = std::move(r.combined);
      out.guess = r.best.guess;
    }
    return out;
  }
  if (s.algorithm == "random-order") {
    std::vector<SetRecord> order(instance.sets().begin(), instance.sets().end());
    std::mt19937_64 shuffle(shuffle_seed);
    std::shuffle(order.begin(), order.end(), shuffle);
    // Guesses run side by side over the same single pass.
    MetricsLedger combined;
    bool first = true;
    for (std::uint64_t v : guesses) {
      RandomOrderConfig config;
      config.budget = k;
      config.epsilon = s.epsilon;
      config.alpha = s.alpha;
      config.beta = s.beta;
      config.guess = v;
      config.seed = seed;
      config.debug_ledger = s.debug_ledger;
      RandomOrderResult r = run_random_order(order, n, config);
      if (r.sets_read != order.size()) throw Error("random-order run did not read every set exactly once");
      if (first) {
        combined = r.ledger;
      } else {
        combined.absorb_parallel(r.ledger);
      }
      if (first || r.solution.coverage() > out.solution.coverage()) {
        out.solution = std::move(r.solution);
        out.guess = v;
        out.windows = r.windows_processed;
        out.reserve_size = r.reserve_size;
      }
      first = false;
    }
    out.ledger = std::move(combined);
    return out;
  }
  throw Error("unknown algorithm '" + s.algorithm + "'");
}

// Empty when the solution is consistent with the instance.
std::string check_invariants(const TrialInput& input, const TrialMetrics& metrics, std::optional<std::size_t> opt) {
  const Instance& instance = input.instance;
  const CoverageState& sol = metrics.solution;
  if (sol.budget_used() > instance.budget()) return "solution exceeds the budget";
  std::unordered_set<SetId> seen;
  for (SetId id : sol.chosen) {
    if (!instance.contains(id)) return "solution names a set outside the live instance";
    if (!seen.insert(id).second) return "solution repeats a set";
  }
  if (coverage(instance, sol.chosen) != sol.coverage()) return "reported coverage differs from a recount";
  if (opt && sol.coverage() > *opt) return "coverage exceeds opt";
  return {};
}

std::string format_double(double value) {
  std::ostringstream out;
  out << value;
  return out.str();
}

ExperimentOutcome run_urn(const json& j, const Settings& s, std::ostream& csv) {
  const json& u = j.contains("urn") ? j.at("urn") : json::object();
  const std::string process = get_or<std::string>(u, "process", "single");
  if (process != "single" && process != "cascade") throw Error("urn process must be 'single' or 'cascade'");
  std::vector<std::vector<std::uint64_t>> sizes;
  for (const json& entry : u.at("sizes")) {
    if (entry.is_array()) {
      sizes.push_back(entry.get<std::vector<std::uint64_t>>());
    } else {
      sizes.push_back({entry.get<std::uint64_t>()});
    }
  }
  const std::vector<std::string> adversaries =
      get_or<std::vector<std::string>>(u, "adversaries", {"none", "fraction:0.5", "max-damage"});
  const std::size_t trials = get_or<std::size_t>(u, "trials", std::max<std::size_t>(s.trials, 100));
  const std::uint64_t d = get_or<std::uint64_t>(u, "d", 0);
  const PhaseBoundReport report = phase_bound_experiment(
      process == "single" ? UrnProcess::Single : UrnProcess::Cascade, sizes, trials, adversaries, s.seed, d);
  write_urn_trials(csv, report);
  ExperimentOutcome out;
  out.trials = report.trials.size();
  return out;
}

}  // namespace

ExperimentOutcome run_experiment(const std::string& json_text, std::ostream& csv,
                                 const std::filesystem::path& base_dir,
                                 std::optional<std::uint64_t> seed_override) {
  json j;
  Settings s;
  try {
    j = json::parse(json_text);
    s = read_settings(j, base_dir);
  } catch (const json::exception& e) {
    throw Error(std::string("bad experiment config: ") + e.what());
  }
  if (seed_override) s.seed = *seed_override;
  if (s.algorithm == "urn") return run_urn(j, s, csv);

  std::optional<TrialInput> fixed;
  if (!s.profile) {
    if (s.instance_path) {
      Instance instance = parse_instance_file(*s.instance_path);
      if (s.budget) instance = with_budget(instance, *s.budget);
      std::vector<StreamToken> tokens = inserts_of(instance);
      fixed = TrialInput{std::move(instance), std::move(tokens), std::nullopt};
    } else {
      if (!s.budget) throw Error("a stream config needs 'k'");
      ParsedStream parsed = parse_stream_file(*s.stream_path);
      Instance instance = live_instance(parsed.tokens, parsed.universe, *s.budget);
      fixed = TrialInput{std::move(instance), std::move(parsed.tokens), std::nullopt};
    }
    if (s.certificate_path) {
      std::ifstream in(*s.certificate_path);
      if (!in) throw Error("cannot open " + s.certificate_path->string());
      fixed->certificate = parse_certificate(in);
    }
  }

  CsvWriter writer(csv, metrics_columns());
  ExperimentOutcome outcome;
  for (std::size_t trial = 0; trial < s.trials; ++trial) {
    const std::uint64_t seed = mix_seed(s.seed, trial);
    std::optional<TrialInput> generated;
    if (s.profile) {
      GeneratorProfile profile = *s.profile;
      profile.seed = seed;
      GeneratedData data = generate(profile);
      generated = TrialInput{std::move(data.instance), std::move(data.stream), std::move(data.certificate)};
    }
    const TrialInput& input = generated ? *generated : *fixed;
    const Instance& instance = input.instance;
    std::vector<std::string> row(metrics_columns().size());
    row[0] = std::to_string(trial);
    row[1] = s.algorithm;
    row[2] = std::to_string(seed);
    row[3] = std::to_string(instance.universe_size());
    row[4] = std::to_string(instance.num_sets());
    row[5] = std::to_string(instance.budget());
    row[6] = format_double(s.epsilon);
    row[8] = std::to_string(s.alpha);
    row[9] = std::to_string(s.beta);
    ++outcome.trials;
    try {
      const std::optional<std::size_t> opt = exact_opt(input, s.oracle_cap);
      const auto start = std::chrono::steady_clock::now();
      const std::uint64_t shuffle_seed = s.shuffle_seed ? mix_seed(*s.shuffle_seed, trial) : mix_seed(seed, 0x5f);
      TrialMetrics metrics = run_algorithm(s, input, opt, seed, shuffle_seed);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      metrics.ledger.set_wall_time_ms(ms);
      metrics.ledger.set_coverage(metrics.solution.coverage());
      if (opt) metrics.ledger.set_opt(*opt);
      if (metrics.guess) row[7] = std::to_string(*metrics.guess);
      row[10] = std::to_string(metrics.ledger.passes());
      row[11] = std::to_string(metrics.ledger.peak_stored_elements());
      row[12] = std::to_string(metrics.ledger.sketch_words());
      row[13] = std::to_string(metrics.solution.coverage());
      if (opt) row[14] = std::to_string(*opt);
      if (const auto ratio = metrics.ledger.ratio()) row[15] = format_double(*ratio);
      row[16] = format_double(ms);
      row[17] = std::to_string(metrics.windows);
      row[18] = std::to_string(metrics.reserve_size);
      const std::string problem = check_invariants(input, metrics, opt);
      row[19] = problem.empty() ? "ok" : "fail";
      row[20] = problem;
      if (!problem.empty()) {
        ++outcome.failures;
        outcome.messages.push_back("trial " + row[0] + ": " + problem);
      }
    } catch (const std::exception& e) {
      row[19] = "error";
      row[20] = error_kind(e) + ": " + e.what();
      ++outcome.failures;
      outcome.messages.push_back("trial " + row[0] + ": " + row[20]);
    }
    writer.row(row);
  }
  return outcome;
}

ExperimentOutcome run_experiment_file(const std::filesystem::path& path, std::ostream& csv,
                                      std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return run_experiment(text.str(), csv, path.parent_path(), seed_override);
}

}  // namespace streamcov
