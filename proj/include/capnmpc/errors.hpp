// Copyright 2026 The capnmpc Authors
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

#ifndef CAPNMPC__ERRORS_HPP_
#define CAPNMPC__ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace capnmpc {

/// Non-finite or out-of-domain arguments to a model step.
class InvalidInputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Vector or matrix dimensions that do not chain.
class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Failure while reading a weights file. `field()` names the offending key
/// (empty for I/O and syntax failures).
class LoadError : public std::runtime_error {
public:
  enum class Kind { missing_file, parse, invariant };

  LoadError(Kind kind, std::string field, const std::string & what)
  : std::runtime_error(what), kind_(kind), field_(std::move(field)) {}

  Kind kind() const { return kind_; }
  const std::string & field() const { return field_; }

private:
  Kind kind_;
  std::string field_;
};

/// Every particle at some horizon step carries zero weight.
class DegenerateHorizonError : public std::runtime_error {
public:
  explicit DegenerateHorizonError(std::size_t step)
  : std::runtime_error("all particles have zero weight at horizon step " + std::to_string(step)),
    step_(step) {}

  std::size_t step() const { return step_; }

private:
  std::size_t step_;
};

class DegenerateSmoothingError : public std::runtime_error {
public:
  explicit DegenerateSmoothingError(std::size_t step)
  : std::runtime_error("zero normalizer in backward smoothing at horizon step " + std::to_string(step)),
    step_(step) {}

  std::size_t step() const { return step_; }

private:
  std::size_t step_;
};

/// A state/control sequence that does not follow the dynamics model.
class InvalidTrajectoryError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Bad configuration value. `field()` is the dotted key path.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string & what)
  : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string & field() const { return field_; }

private:
  std::string field_;
};

}  // namespace capnmpc

#endif  // CAPNMPC__ERRORS_HPP_
