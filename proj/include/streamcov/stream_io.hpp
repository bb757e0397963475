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

#ifndef STREAMCOV_STREAM_IO_HPP_
#define STREAMCOV_STREAM_IO_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamcov/core_model.hpp"

namespace streamcov {

// Stream files hold one token per line:
//   # n=<universe>        optional first line
//   + <id> <e1> <e2> ...  insert, elements ascending
//   - <id>                delete
struct ParsedStream {
  Element universe = 0;
  std::vector<StreamToken> tokens;
  std::vector<std::size_t> lines;  // source line of each token
};

// Without a header the universe is the largest element seen (at least 1),
// unless `universe` is given. Throws ParseError or ValidationError.
ParsedStream parse_stream(std::istream& in, std::optional<Element> universe = std::nullopt);
ParsedStream parse_stream_file(const std::filesystem::path& path, std::optional<Element> universe = std::nullopt);
void write_stream(std::ostream& out, Element universe, std::span<const StreamToken> tokens);

// Instance files: a header line "<n> <m> <k>", then m lines "<id> <e1> ...".
Instance parse_instance(std::istream& in);
Instance parse_instance_file(const std::filesystem::path& path);
void write_instance(std::ostream& out, const Instance& instance);

// Certificate files: "value <v>" then "ids <id> ...".
struct Certificate {
  std::size_t value = 0;
  std::vector<SetId> ids;
  friend bool operator==(const Certificate&, const Certificate&) = default;
};
Certificate parse_certificate(std::istream& in);
void write_certificate(std::ostream& out, const Certificate& certificate);

// Comma-separated rows behind a fixed header whose first column is the
// schema version.
inline constexpr int kCsvSchema = 1;

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> columns);
  void row(const std::vector<std::string>& values);
  std::size_t rows() const { return rows_; }

 private:
  std::ostream& out_;
  std::size_t width_;
  std::size_t rows_ = 0;
};

std::string csv_escape(const std::string& field);

}  // namespace streamcov

#endif  // STREAMCOV_STREAM_IO_HPP_
