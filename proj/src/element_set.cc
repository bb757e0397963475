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

#include <bit>

#include "streamcov/types.hpp"

namespace streamcov {

ElementSet::ElementSet(Element universe)
    : universe_(universe), words_((static_cast<std::size_t>(universe) >> 6) + 1, 0) {}

bool ElementSet::insert(Element e) {
  if (e < 1 || e > universe_) return false;
  std::uint64_t& word = words_[e >> 6];
  const std::uint64_t bit = std::uint64_t{1} << (e & 63);
  if ((word & bit) != 0) return false;
  word |= bit;
  ++size_;
  return true;
}

std::size_t ElementSet::insert_all(std::span<const Element> elements) {
  std::size_t added = 0;
  for (const Element e : elements) added += insert(e) ? 1 : 0;
  return added;
}

std::size_t ElementSet::count_missing(std::span<const Element> elements) const {
  std::size_t missing = 0;
  for (const Element e : elements) missing += contains(e) ? 0 : 1;
  return missing;
}

std::vector<Element> ElementSet::missing(std::span<const Element> elements) const {
  std::vector<Element> out;
  for (const Element e : elements) {
    if (!contains(e)) out.push_back(e);
  }
  return out;
}

std::vector<Element> ElementSet::to_vector() const {
  std::vector<Element> out;
  out.reserve(size_);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      const int b = std::countr_zero(bits);
      out.push_back(static_cast<Element>(w * 64 + b));
      bits &= bits - 1;
    }
  }
  return out;
}

}  // namespace streamcov
