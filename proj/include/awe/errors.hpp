// awe/errors.hpp

// Copyright 2026  AWE Toolkit Authors

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

#ifndef AWE_ERRORS_HPP_
#define AWE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace awe {

// Base of all toolkit errors. The CLI maps subclasses onto exit codes:
// usage/input problems -> 2, data-format problems -> 3, numeric failures -> 4.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad argument values or shape mismatches at an API boundary.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// An input that parsed but violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Text input that could not be parsed (manifest rows, numbers).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Missing or unopenable file.
class IoError : public Error {
 public:
  using Error::Error;
};

// Binary input with an unsupported encoding (WAV headers and the like).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Interval or index outside the valid range of the data.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Operation invoked on a model in the wrong mode.
class StateError : public Error {
 public:
  using Error::Error;
};

// Symbol not present in the model vocabulary.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

// Truncated or corrupted binary file (bad magic, short read).
class CorruptionError : public Error {
 public:
  using Error::Error;
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A referenced segment id has no stored data.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace awe

#endif  // AWE_ERRORS_HPP_
