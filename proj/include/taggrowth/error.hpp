// Copyright 2026 The taggrowth Authors.
//
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace taggrowth {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input record. Carries the 1-based line number of the offending
// record (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Input that parses but violates an ordering or consistency contract
// (decreasing timestamps, non-consecutive TAS indices, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// An analysis was asked to run on data that does not satisfy its
// precondition (empty stream, too few samples, tau_max < 2, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Invalid generator or analysis configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace taggrowth
