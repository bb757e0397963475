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

// Command-line front end: gen, run, urn and validate.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "streamcov/errors.hpp"
#include "streamcov/experiment.hpp"
#include "streamcov/generator.hpp"
#include "streamcov/stream_io.hpp"
#include "streamcov/urn_sim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;

struct GenOptions {
  std::string kind = "overlapping";
  std::uint32_t n = 0;
  std::size_t m = 0;
  std::size_t k = 1;
  double density = 0.2;
  std::size_t cover = 0;
  double churn = 0.0;
  std::uint64_t seed = 0;
  std::string prefix = "out";
};

struct RunOptions {
  std::string config;
  std::string algorithm;
  std::string instance;
  std::string stream;
  std::string certificate;
  std::size_t k = 0;
  double epsilon = 0.2;
  std::uint64_t guess = 0;
  std::size_t alpha = 2;
  std::size_t beta = 2;
  std::size_t pass_cap = 0;
  std::uint64_t seed = 0;
  std::uint64_t shuffle_seed = 0;
  std::size_t trials = 1;
  bool debug_ledger = false;
  std::string out;
};

struct UrnOptions {
  std::string process = "single";
  std::vector<std::string> sizes;
  std::vector<std::string> adversaries{"none", "fraction:0.5", "max-damage"};
  std::size_t trials = 200;
  std::uint64_t d = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct ValidateOptions {
  std::string stream;
  std::string instance;
  std::uint32_t n = 0;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw streamcov::Error("cannot write " + path);
  out << text;
}

int run_gen(const GenOptions& o, std::optional<std::uint64_t> env_seed) {
  streamcov::GeneratorProfile profile;
  profile.kind = streamcov::parse_profile_kind(o.kind);
  profile.universe = o.n;
  profile.num_sets = o.m;
  profile.budget = o.k;
  profile.density = o.density;
  profile.cover = o.cover;
  profile.churn = o.churn;
  profile.seed = env_seed.value_or(o.seed);
  const streamcov::GeneratedData data = streamcov::generate(profile);
  std::ostringstream instance, stream;
  streamcov::write_instance(instance, data.instance);
  streamcov::write_stream(stream, data.instance.universe_size(), data.stream);
  write_file(o.prefix + ".instance", instance.str());
  write_file(o.prefix + ".stream", stream.str());
  if (data.certificate) {
    std::ostringstream cert;
    streamcov::write_certificate(cert, *data.certificate);
    write_file(o.prefix + ".cert", cert.str());
  }
  std::cout << "wrote " << o.prefix << ".instance (" << data.instance.num_sets() << " live sets), " << o.prefix
            << ".stream (" << data.stream.size() << " tokens)";
  if (data.certificate) std::cout << ", " << o.prefix << ".cert (value " << data.certificate->value << ")";
  std::cout << '\n';
  return kExitOk;
}

int finish_experiment(const streamcov::ExperimentOutcome& outcome) {
  for (const std::string& message : outcome.messages) std::cerr << message << '\n';
  return outcome.ok() ? kExitOk : kExitAssertion;
}

int run_run(const RunOptions& o, const CLI::App& cmd, std::optional<std::uint64_t> env_seed) {
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw streamcov::Error("cannot write " + o.out);
  }
  std::ostream& csv = o.out.empty() ? std::cout : file;
  if (!o.config.empty()) return finish_experiment(streamcov::run_experiment_file(o.config, csv, env_seed));

  if (o.algorithm.empty()) throw CLI::RequiredError("--algorithm or --config");
  nlohmann::json j;
  j["algorithm"] = o.algorithm;
  j["trials"] = o.trials;
  j["seed"] = o.seed;
  j["epsilon"] = o.epsilon;
  j["alpha"] = o.alpha;
  j["beta"] = o.beta;
  j["pass_cap"] = o.pass_cap;
  j["debug_ledger"] = o.debug_ledger;
  if (o.k != 0) j["k"] = o.k;
  if (cmd.count("--guess") > 0) j["guess"] = o.guess;
  if (cmd.count("--shuffle-seed") > 0) j["shuffle_seed"] = o.shuffle_seed;
  if (!o.instance.empty()) j["instance"] = o.instance;
  if (!o.stream.empty()) j["stream"] = o.stream;
  if (!o.certificate.empty()) j["certificate"] = o.certificate;
  return finish_experiment(streamcov::run_experiment(j.dump(), csv, ".", env_seed));
}

int run_urn(const UrnOptions& o, std::optional<std::uint64_t> env_seed) {
  std::vector<std::vector<std::uint64_t>> sizes;
  for (const std::string& entry : o.sizes) {
    std::vector<std::uint64_t> urns;
    std::stringstream parts(entry);
    std::string part;
    while (std::getline(parts, part, ';')) urns.push_back(std::stoull(part));
    sizes.push_back(urns);
  }
  const streamcov::PhaseBoundReport report = streamcov::phase_bound_experiment(
      o.process == "single" ? streamcov::UrnProcess::Single : streamcov::UrnProcess::Cascade, sizes, o.trials,
      o.adversaries, env_seed.value_or(o.seed), o.d);
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw streamcov::Error("cannot write " + o.out);
  }
  streamcov::write_urn_trials(o.out.empty() ? std::cout : file, report);
  for (const streamcov::UrnSummaryRow& row : report.summary) {
    std::cerr << row.process << " m=" << row.sizes << " d=" << row.d << " " << row.adversary
              << ": p90 phases " << row.p90_phases << ", scale " << row.scale << '\n';
  }
  return kExitOk;
}

int run_validate(const ValidateOptions& o) {
  if (!o.stream.empty()) {
    std::optional<std::uint32_t> n;
    if (o.n != 0) n = o.n;
    const streamcov::ParsedStream parsed = streamcov::parse_stream_file(o.stream, n);
    std::cout << "ok: " << parsed.tokens.size() << " tokens over universe " << parsed.universe << '\n';
  }
  if (!o.instance.empty()) {
    const streamcov::Instance instance = streamcov::parse_instance_file(o.instance);
    std::cout << "ok: " << instance.num_sets() << " sets, k = " << instance.budget() << '\n';
  }
  if (o.stream.empty() && o.instance.empty()) throw CLI::RequiredError("--stream or --instance");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming maximum coverage toolkit"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate an instance, stream and certificate");
  gen_cmd->add_option("--kind", gen.kind, "disjoint | overlapping | planted | ladder");
  gen_cmd->add_option("--n", gen.n, "Universe size");
  gen_cmd->add_option("--m", gen.m, "Number of sets")->required();
  gen_cmd->add_option("--k", gen.k, "Budget");
  gen_cmd->add_option("--density", gen.density, "Element probability for overlapping sets");
  gen_cmd->add_option("--cover", gen.cover, "Planted cover size");
  gen_cmd->add_option("--churn", gen.churn, "Fraction of sets deleted again");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out", gen.prefix, "Output path prefix");

  RunOptions run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run an algorithm and print per-trial metrics CSV");
  run_cmd->add_option("--config", run.config, "JSON experiment config");
  run_cmd->add_option("--algorithm", run.algorithm, "offline-greedy | quantized | dynamic | random-order");
  run_cmd->add_option("--instance", run.instance, "Instance file");
  run_cmd->add_option("--stream", run.stream, "Stream file");
  run_cmd->add_option("--certificate", run.certificate, "Certificate file");
  run_cmd->add_option("--k", run.k, "Budget");
  run_cmd->add_option("--epsilon", run.epsilon, "Accuracy parameter");
  run_cmd->add_option("--guess", run.guess, "Fixed opt guess v; omit for the guess ladder");
  run_cmd->add_option("--alpha", run.alpha, "Groups chosen per window");
  run_cmd->add_option("--beta", run.beta, "Groups per chosen slot");
  run_cmd->add_option("--pass-cap", run.pass_cap, "Pass limit, 0 for the default");
  run_cmd->add_option("--seed", run.seed, "Algorithm seed");
  run_cmd->add_option("--shuffle-seed", run.shuffle_seed, "Stream shuffle seed for random-order runs");
  run_cmd->add_option("--trials", run.trials, "Trials");
  run_cmd->add_flag("--debug-ledger", run.debug_ledger, "Recount stored elements at every checkpoint");
  run_cmd->add_option("--out", run.out, "CSV output path");

  UrnOptions urn;
  CLI::App* urn_cmd = app.add_subcommand("urn", "Simulate urn processes and print per-trial CSV");
  urn_cmd->add_option("--process", urn.process, "single | cascade")->check(CLI::IsMember({"single", "cascade"}));
  urn_cmd->add_option("--sizes", urn.sizes, "Urn sizes; cascades list m_1;...;m_t")->required();
  urn_cmd->add_option("--adversary", urn.adversaries, "none | fraction:<f> | max-damage | promote-all");
  urn_cmd->add_option("--trials", urn.trials, "Trials per size and adversary (at least 100)");
  urn_cmd->add_option("--d", urn.d, "Draw count d, 0 for the default");
  urn_cmd->add_option("--seed", urn.seed, "Base seed");
  urn_cmd->add_option("--out", urn.out, "CSV output path");

  ValidateOptions validate;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Check a stream or instance file");
  validate_cmd->add_option("--stream", validate.stream, "Stream file");
  validate_cmd->add_option("--instance", validate.instance, "Instance file");
  validate_cmd->add_option("--n", validate.n, "Universe size when the stream has no header");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const std::optional<std::uint64_t> env_seed = streamcov::seed_from_environment();
    if (gen_cmd->parsed()) return run_gen(gen, env_seed);
    if (run_cmd->parsed()) return run_run(run, *run_cmd, env_seed);
    if (urn_cmd->parsed()) return run_urn(urn, env_seed);
    if (validate_cmd->parsed()) return run_validate(validate);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const streamcov::LineError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << streamcov::error_kind(e) << ": " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
