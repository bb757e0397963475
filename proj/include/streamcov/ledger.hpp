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

#ifndef STREAMCOV_LEDGER_HPP_
#define STREAMCOV_LEDGER_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamcov/types.hpp"

namespace streamcov {

// Space and pass accounting for one algorithm run. Stored elements are
// counted at every site that retains or frees universe elements; the
// replayed stream itself is external storage and never counted.
class MetricsLedger {
 public:
  void retain(std::size_t elements);
  void release(std::size_t elements);
  std::size_t stored_elements() const { return current_; }
  std::size_t peak_stored_elements() const { return peak_; }

  void count_pass() { ++passes_; }
  void set_passes(std::size_t passes) { passes_ = passes; }
  std::size_t passes() const { return passes_; }

  void note_sketch_words(std::size_t words);
  std::size_t sketch_words() const { return sketch_words_; }

  void set_coverage(std::size_t covered) { coverage_ = covered; }
  std::size_t coverage() const { return coverage_; }
  void set_opt(std::size_t opt) { opt_ = opt; }
  std::optional<std::size_t> opt() const { return opt_; }
  // coverage / opt when opt is known.
  std::optional<double> ratio() const;

  void set_wall_time_ms(double ms) { wall_time_ms_ = ms; }
  double wall_time_ms() const { return wall_time_ms_; }

  void echo(const std::string& key, const std::string& value) { config_[key] = value; }
  const std::map<std::string, std::string>& config() const { return config_; }

  // Debug mode: when enabled, audit() compares the incremental count with a
  // recount from live structures and throws LedgerMismatch on disagreement.
  void set_debug(bool enabled) { debug_ = enabled; }
  bool debug() const { return debug_; }
  void audit(std::size_t recounted) const;

  // Merges a parallel estimator's ledger: passes are shared, space adds up.
  void absorb_parallel(const MetricsLedger& other);

 private:
  std::size_t current_ = 0;
  std::size_t peak_ = 0;
  std::size_t passes_ = 0;
  std::size_t sketch_words_ = 0;
  std::size_t coverage_ = 0;
  std::optional<std::size_t> opt_;
  double wall_time_ms_ = 0.0;
  bool debug_ = false;
  std::map<std::string, std::string> config_;
};

// An element list whose size is charged to a ledger for as long as it lives.
class StoredElements {
 public:
  StoredElements(MetricsLedger& ledger, std::vector<Element> elements);
  ~StoredElements();
  StoredElements(const StoredElements&) = delete;
  StoredElements& operator=(const StoredElements&) = delete;

  std::span<const Element> elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

 private:
  MetricsLedger* ledger_;
  std::vector<Element> elements_;
};

}  // namespace streamcov

#endif  // STREAMCOV_LEDGER_HPP_
