// Copyright 2026 The diskpca Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <exception>
#include <string>

namespace diskpca {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Malformed or unusable input data (files, configs, shapes of user data).
class DataError : public Error {
 public:
  using Error::Error;
};

// Factorization breakdowns, non-PSD inputs, violated numerical invariants.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Bad parameters passed to an operation (k = 0, empty inputs, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Failures inside the simulated network: poisoned payloads, aborted rounds,
// isolation violations.
class CommError : public Error {
 public:
  using Error::Error;
  CommError(const std::string& what, std::exception_ptr cause) : Error(what), cause_(std::move(cause)) {}
  // The exception that aborted the round, if any.
  const std::exception_ptr& cause() const { return cause_; }

 private:
  std::exception_ptr cause_;
};

}  // namespace diskpca
