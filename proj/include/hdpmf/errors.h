// Copyright 2026 The HDPMF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HDPMF_ERRORS_H_
#define HDPMF_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdpmf {

// Caller passed arguments that violate a documented precondition.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value that should be impossible under the module invariants.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed dataset file. `line()` is 1-based; 0 when not line-specific.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " +
                                           what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Message sequencing violated between devices and the recommender.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Training produced a non-finite parameter.
class DivergedError : public std::runtime_error {
 public:
  explicit DivergedError(int epoch)
      : std::runtime_error("training diverged at epoch " +
                           std::to_string(epoch)),
        epoch_(epoch) {}

  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

}  // namespace hdpmf

#endif  // HDPMF_ERRORS_H_
