// Copyright 2026 The QOPS Authors
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

#ifndef QOPS_ERROR_HPP
#define QOPS_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qops {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unsupported OpenQASM input. Carries a 1-based source position.
class ParseError : public Error {
  public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

/// A compact specification that fails validation or no longer matches the partitioner.
class SpecError : public Error {
  public:
    using Error::Error;
};

}  // namespace qops

#endif  // QOPS_ERROR_HPP
