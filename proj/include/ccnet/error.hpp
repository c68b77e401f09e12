// Copyright 2026 The ccnet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CCNET_ERROR_HPP
#define CCNET_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ccnet {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or length disagreement between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `line()` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A row whose norm is too small for a cosine to be defined.
class DegenerateRowError : public Error {
 public:
  explicit DegenerateRowError(std::ptrdiff_t row)
      : Error("degenerate (near-zero) row " + std::to_string(row)), row_(row) {}

  std::ptrdiff_t row() const { return row_; }

 private:
  std::ptrdiff_t row_;
};

class EmptyDictionaryError : public Error {
 public:
  using Error::Error;
};

// Unresolvable reference: unknown word, language or vocabulary overlap.
class LookupError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccnet

#endif  // CCNET_ERROR_HPP
