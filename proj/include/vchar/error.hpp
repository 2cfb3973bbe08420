// Copyright 2026 The vchar Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
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
#include <utility>

namespace vchar {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched vector lengths and similar shape violations.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Invalid or non-finite numeric input to an algorithm.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Semantically invalid configuration (tables, scenarios, plans).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Syntax error in a configuration file, carrying a 1-based location.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : ConfigError(what + " (line " + std::to_string(line) + ", column " +
                    std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// The integrator produced a non-finite state.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, std::size_t step)
      : Error(what + " at step " + std::to_string(step)), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Socket-level failure talking to an external simulator.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Malformed bridge message; `field()` names the offending field.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::string field)
      : Error(what + ": " + field), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A decoded or loaded artifact violates its own invariants.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace vchar
