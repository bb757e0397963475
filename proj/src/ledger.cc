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

#include "streamcov/ledger.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "streamcov/errors.hpp"

namespace streamcov {

void MetricsLedger::retain(std::size_t elements) {
  current_ += elements;
  peak_ = std::max(peak_, current_);
}

void MetricsLedger::release(std::size_t elements) {
  if (elements > current_) throw std::logic_error("ledger released more elements than retained");
  current_ -= elements;
}

void MetricsLedger::note_sketch_words(std::size_t words) {
  sketch_words_ = std::max(sketch_words_, words);
}

std::optional<double> MetricsLedger::ratio() const {
  if (!opt_) return std::nullopt;
  if (*opt_ == 0) return 1.0;
  return static_cast<double>(coverage_) / static_cast<double>(*opt_);
}

void MetricsLedger::audit(std::size_t recounted) const {
  if (debug_ && recounted != current_) {
    throw LedgerMismatch("ledger holds " + std::to_string(current_) +
                         " stored elements but live structures hold " + std::to_string(recounted));
  }
}

void MetricsLedger::absorb_parallel(const MetricsLedger& other) {
  passes_ = std::max(passes_, other.passes_);
  peak_ += other.peak_;
  sketch_words_ += other.sketch_words_;
}

StoredElements::StoredElements(MetricsLedger& ledger, std::vector<Element> elements)
    : ledger_(&ledger), elements_(std::move(elements)) {
  ledger_->retain(elements_.size());
}

StoredElements::~StoredElements() { ledger_->release(elements_.size()); }

}  // namespace streamcov
