// Copyright 2026 The micode Authors
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

#include <stdexcept>
#include <string>

namespace micode {

// Base for all library errors. `code()` is a short machine-readable tag
// used by the CLI error line and the HTTP error body.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Bad input data: malformed records, violated preconditions on data.
class DataError : public Error {
 public:
  using Error::Error;
  explicit DataError(const std::string& message) : Error("data_error", message) {}
};

// Caller misuse: invalid arguments or configuration.
class UsageError : public Error {
 public:
  using Error::Error;
  explicit UsageError(const std::string& message) : Error("usage_error", message) {}
};

// Model-side failures (missing model, k mismatch, separation).
class ModelError : public Error {
 public:
  using Error::Error;
  explicit ModelError(const std::string& message) : Error("model_error", message) {}
};

// Malformed response from an external inference endpoint.
class ProtocolError : public Error {
 public:
  using Error::Error;
  explicit ProtocolError(const std::string& message) : Error("protocol_error", message) {}
};

// Transient failure (network, timeout); the caller may retry.
class RetriableError : public Error {
 public:
  using Error::Error;
  explicit RetriableError(const std::string& message) : Error("retriable", message) {}
};

}  // namespace micode
