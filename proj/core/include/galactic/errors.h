// Copyright 2026 The Galactic Authors.
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

#ifndef GALACTIC_ERRORS_H_
#define GALACTIC_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace galactic {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CoNLL-U, model, or LM input. `line` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Missing or unreadable file.
class IoError : public Error {
 public:
  using Error::Error;
};

// Missing model, POS-class mismatch, malformed language spec.
class ModelError : public Error {
 public:
  using Error::Error;
};

// A quantity that is undefined on the given input (e.g. freeness with no
// permutable node).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

}  // namespace galactic

#endif  // GALACTIC_ERRORS_H_
