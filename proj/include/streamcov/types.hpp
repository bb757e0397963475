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

#ifndef STREAMCOV_TYPES_HPP_
#define STREAMCOV_TYPES_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace streamcov {

// Universe elements are 1-based: valid values are 1..n.
using Element = std::uint32_t;

// Identifier of a set. Kept as a distinct type so it never mixes with
// element values or positions.
enum class SetId : std::uint64_t {};

constexpr std::uint64_t raw(SetId id) { return static_cast<std::uint64_t>(id); }
constexpr SetId make_id(std::uint64_t value) { return static_cast<SetId>(value); }

struct SetRecord {
  SetId id{};
  // Strictly increasing, each in [1, n].
  std::vector<Element> elements;

  friend bool operator==(const SetRecord&, const SetRecord&) = default;
};

// Dense membership structure over the universe [1, n].
class ElementSet {
 public:
  ElementSet() = default;
  explicit ElementSet(Element universe);

  Element universe() const { return universe_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool contains(Element e) const {
    return e >= 1 && e <= universe_ && ((words_[e >> 6] >> (e & 63)) & 1U) != 0;
  }

  // Returns true if e was newly inserted.
  bool insert(Element e);
  // Returns the number of newly inserted elements.
  std::size_t insert_all(std::span<const Element> elements);

  // |elements \ this|
  std::size_t count_missing(std::span<const Element> elements) const;
  // elements \ this, order preserved.
  std::vector<Element> missing(std::span<const Element> elements) const;

  std::vector<Element> to_vector() const;

  friend bool operator==(const ElementSet&, const ElementSet&) = default;

 private:
  Element universe_ = 0;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace streamcov

template <>
struct std::hash<streamcov::SetId> {
  std::size_t operator()(streamcov::SetId id) const noexcept {
    return std::hash<std::uint64_t>{}(streamcov::raw(id));
  }
};

#endif  // STREAMCOV_TYPES_HPP_
