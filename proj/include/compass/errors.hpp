/*
 * Copyright (c) 2026, The Compass Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef COMPASS_ERRORS_HPP_
#define COMPASS_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace compass {

// Base for every error the engine reports. `code()` is a stable machine
// readable identifier used by the CLI and the HTTP service.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t col, const std::string& message)
      : Error("SyntaxError", std::to_string(line) + ":" + std::to_string(col) +
                                 ": " + message),
        line_(line),
        col_(col) {}

  std::size_t line() const { return line_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t line_;
  std::size_t col_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error("ValidationError", message) {}
};

class ModelTooLarge : public Error {
 public:
  explicit ModelTooLarge(const std::string& message)
      : Error("ModelTooLarge", message) {}
};

class UnsupportedPattern : public Error {
 public:
  explicit UnsupportedPattern(const std::string& message)
      : Error("UnsupportedPattern", message) {}
};

class ScriptMismatch : public Error {
 public:
  explicit ScriptMismatch(const std::string& message)
      : Error("ScriptMismatch", message) {}
};

class Deadlock : public Error {
 public:
  explicit Deadlock(const std::string& message) : Error("Deadlock", message) {}
};

class NotOnTrace : public Error {
 public:
  explicit NotOnTrace(const std::string& message)
      : Error("NotOnTrace", message) {}
};

class ResourceLimit : public Error {
 public:
  explicit ResourceLimit(const std::string& message)
      : Error("ResourceLimit", message) {}
};

class EncodingTooLarge : public Error {
 public:
  explicit EncodingTooLarge(const std::string& message)
      : Error("EncodingTooLarge", message) {}
};

class PlanInapplicable : public Error {
 public:
  explicit PlanInapplicable(const std::string& message)
      : Error("PlanInapplicable", message) {}
};

}  // namespace compass

#endif  // COMPASS_ERRORS_HPP_
