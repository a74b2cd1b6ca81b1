/*
 * Copyright 2026 The fisim Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FISIM_ERROR_HPP
#define FISIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fisim {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value, recipe, or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Column/name lookup failures and incompatible table layouts.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Inputs whose size or length violates an operation's precondition.
class SizeError : public Error {
 public:
  using Error::Error;
};

// CSV / file ingestion problems; messages carry row and column location.
class IngestError : public Error {
 public:
  using Error::Error;
};

// Degenerate statistical input: single-class targets, zero vectors.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Problem too large for an exact enumeration path; the message names the
// scalable alternative.
class TractabilityError : public Error {
 public:
  using Error::Error;
};

// Internal consistency violation (malformed model state).
class InternalError : public Error {
 public:
  using Error::Error;
};

// Filesystem / output failures.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fisim

#endif  // FISIM_ERROR_HPP
