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

#include "streamcov/stream_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "streamcov/errors.hpp"

namespace streamcov {
namespace {

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) words.push_back(line.substr(start, i - start));
  }
  return words;
}

template <typename T>
T parse_number(std::string_view word, std::size_t line, const char* what) {
  T value{};
  const auto [end, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || end != word.data() + word.size()) {
    throw ParseError(line, std::string("bad ") + what + " '" + std::string(word) + "'");
  }
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

void write_elements(std::ostream& out, std::span<const Element> elements) {
  for (Element e : elements) out << ' ' << e;
}

}  // namespace

ParsedStream parse_stream(std::istream& in, std::optional<Element> universe) {
  ParsedStream out;
  std::string text;
  std::size_t line = 0;
  std::optional<Element> header;
  Element largest = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto words = split_words(text);
    if (words.empty()) throw ParseError(line, "empty line");
    if (words[0] == "#") {
      if (line != 1 || words.size() != 2 || words[1].substr(0, 2) != "n=") {
        throw ParseError(line, "only a leading '# n=<n>' header is allowed");
      }
      header = parse_number<Element>(words[1].substr(2), line, "universe size");
      continue;
    }
    StreamToken token;
    if (words[0] == "+") {
      token.op = Op::Insert;
    } else if (words[0] == "-") {
      token.op = Op::Delete;
    } else {
      throw ParseError(line, "expected '+' or '-', got '" + std::string(words[0]) + "'");
    }
    if (words.size() < 2) throw ParseError(line, "missing set id");
    token.set.id = make_id(parse_number<std::uint64_t>(words[1], line, "set id"));
    if (token.op == Op::Delete && words.size() > 2) throw ParseError(line, "delete lines carry only the id");
    for (std::size_t w = 2; w < words.size(); ++w) {
      const Element e = parse_number<Element>(words[w], line, "element");
      token.set.elements.push_back(e);
      largest = std::max(largest, e);
    }
    out.tokens.push_back(std::move(token));
    out.lines.push_back(line);
  }
  out.universe = universe ? *universe : header ? *header : std::max<Element>(largest, 1);
  try {
    validate_stream(out.tokens, out.universe);
  } catch (const ValidationError& e) {
    const std::string message = e.what();
    const std::string prefix = "line " + std::to_string(e.line()) + ": ";
    const std::string detail = message.rfind(prefix, 0) == 0 ? message.substr(prefix.size()) : message;
    throw ValidationError(out.lines.at(e.line() - 1), detail);
  }
  return out;
}

ParsedStream parse_stream_file(const std::filesystem::path& path, std::optional<Element> universe) {
  std::ifstream in = open_input(path);
  return parse_stream(in, universe);
}

void write_stream(std::ostream& out, Element universe, std::span<const StreamToken> tokens) {
  out << "# n=" << universe << '\n';
  for (const StreamToken& token : tokens) {
    if (token.op == Op::Insert) {
      out << "+ " << raw(token.set.id);
      write_elements(out, token.set.elements);
    } else {
      out << "- " << raw(token.set.id);
    }
    out << '\n';
  }
}

Instance parse_instance(std::istream& in) {
  std::string text;
  if (!std::getline(in, text)) throw ParseError(1, "missing header line");
  const auto header = split_words(text);
  if (header.size() != 3) throw ParseError(1, "header must be '<n> <m> <k>'");
  const auto n = parse_number<Element>(header[0], 1, "universe size");
  const auto m = parse_number<std::size_t>(header[1], 1, "set count");
  const auto k = parse_number<std::size_t>(header[2], 1, "budget");
  std::vector<SetRecord> sets;
  std::size_t line = 1;
  while (std::getline(in, text)) {
    ++line;
    const auto words = split_words(text);
    if (words.empty()) throw ParseError(line, "empty line");
    SetRecord record;
    record.id = make_id(parse_number<std::uint64_t>(words[0], line, "set id"));
    for (std::size_t w = 1; w < words.size(); ++w) {
      record.elements.push_back(parse_number<Element>(words[w], line, "element"));
    }
    if (const std::string problem = describe_record_problem(record, n); !problem.empty()) {
      throw ValidationError(line, problem);
    }
    sets.push_back(std::move(record));
  }
  if (sets.size() != m) {
    throw ParseError(line, "header announces " + std::to_string(m) + " sets, found " + std::to_string(sets.size()));
  }
  try {
    return Instance(n, k, std::move(sets));
  } catch (const InvalidInstance& e) {
    throw ValidationError(1, e.what());
  }
}

Instance parse_instance_file(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse_instance(in);
}

void write_instance(std::ostream& out, const Instance& instance) {
  out << instance.universe_size() << ' ' << instance.sets().size() << ' ' << instance.budget() << '\n';
  for (const SetRecord& set : instance.sets()) {
    out << raw(set.id);
    write_elements(out, set.elements);
    out << '\n';
  }
}

Certificate parse_certificate(std::istream& in) {
  Certificate out;
  std::string text;
  if (!std::getline(in, text)) throw ParseError(1, "missing value line");
  auto words = split_words(text);
  if (words.size() != 2 || words[0] != "value") throw ParseError(1, "expected 'value <v>'");
  out.value = parse_number<std::size_t>(words[1], 1, "value");
  if (!std::getline(in, text)) throw ParseError(2, "missing ids line");
  words = split_words(text);
  if (words.empty() || words[0] != "ids") throw ParseError(2, "expected 'ids <id> ...'");
  for (std::size_t w = 1; w < words.size(); ++w) {
    out.ids.push_back(make_id(parse_number<std::uint64_t>(words[w], 2, "set id")));
  }
  if (std::getline(in, text)) throw ParseError(3, "trailing content");
  return out;
}

void write_certificate(std::ostream& out, const Certificate& certificate) {
  out << "value " << certificate.value << "\nids";
  for (SetId id : certificate.ids) out << ' ' << raw(id);
  out << '\n';
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> columns)
    : out_(out), width_(columns.size() + 1) {
  out_ << "schema";
  for (const std::string& c : columns) out_ << ',' << csv_escape(c);
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& values) {
  if (values.size() + 1 != width_) throw std::invalid_argument("CSV row width does not match the header");
  out_ << kCsvSchema;
  for (const std::string& v : values) out_ << ',' << csv_escape(v);
  out_ << '\n';
  ++rows_;
}

}  // namespace streamcov
