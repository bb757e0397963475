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

#ifndef STREAMCOV_ERRORS_HPP_
#define STREAMCOV_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace streamcov {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownId : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class BadField : public Error {
 public:
  using Error::Error;
};

class InvalidInstance : public Error {
 public:
  using Error::Error;
};

class InvalidProfile : public Error {
 public:
  using Error::Error;
};

// Raised by BatchSampler::draw when a group needs more sketches than it owns.
class GroupExhausted : public Error {
 public:
  using Error::Error;
};

class EmptySupport : public Error {
 public:
  using Error::Error;
};

class SketchFailure : public Error {
 public:
  using Error::Error;
};

class PassCapExceeded : public Error {
 public:
  using Error::Error;
};

// A space cap derived from the algorithm's own accounting was violated. This
// always signals an implementation bug, never bad input.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class LedgerMismatch : public Error {
 public:
  using Error::Error;
};

// Errors tied to a line of an input file. `line` is 1-based.
class LineError : public Error {
 public:
  LineError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ParseError : public LineError {
 public:
  using LineError::LineError;
};

class ValidationError : public LineError {
 public:
  using LineError::LineError;
};

}  // namespace streamcov

#endif  // STREAMCOV_ERRORS_HPP_
