// zevox/errors.h

// Copyright 2026  The zevox Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ZEVOX_ERRORS_H_
#define ZEVOX_ERRORS_H_

#include <stdexcept>
#include <string>

namespace zevox {

/// Base class of every error thrown by the library. Messages are prefixed
/// with the owning module, e.g. "flow: singular linear map".
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// Invalid configuration values (counts, spreads, epochs, enum values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (embedding CSV, f0 CSV, config files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary input (model files, WAV files).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Inputs outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or singular intermediates.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Preconditions of an operation on data (missing classes, too few speakers).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace zevox

#endif  // ZEVOX_ERRORS_H_
