// Copyright 2026 The pnmkit Authors
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

namespace pnm {

/// Root of every exception thrown by pnmkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failures (exit code 2 in the CLI).
class NumericError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

/// Smallest singular value of a map fell below the singularity tolerance.
class SingularMap : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonHermitianChoi : public NumericError {
 public:
  using NumericError::NumericError;
};

class NonFiniteResult : public NumericError {
 public:
  using NumericError::NumericError;
};

class QuadratureFailure : public NumericError {
 public:
  using NumericError::NumericError;
};

class CptpViolation : public NumericError {
 public:
  using NumericError::NumericError;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ZeroDifference : public Error {
 public:
  using Error::Error;
};

class DegeneratePair : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Expression text errors. `offset()` is the byte offset into the source.
class ExprError : public Error {
 public:
  ExprError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class SyntaxError : public ExprError {
 public:
  using ExprError::ExprError;
};

class UnknownFunction : public ExprError {
 public:
  using ExprError::ExprError;
};

class UnbalancedParens : public ExprError {
 public:
  using ExprError::ExprError;
};

/// Configuration errors (exit code 1 in the CLI).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Missing or invalid field; `pointer()` is a JSON pointer to the field.
class SchemaError : public ConfigError {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : ConfigError(pointer + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

/// Bad function text inside a config document.
class ConfigExprError : public ConfigError {
 public:
  ConfigExprError(const std::string& pointer, const std::string& what)
      : ConfigError(pointer + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace pnm
