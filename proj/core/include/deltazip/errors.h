/* Copyright 2026 The DeltaZip Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deltazip {

// Root of every error thrown by the library. The CLI maps the two
// families below onto its exit codes: InputError -> 1, NumericError -> 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad caller input: shapes, arguments, files, traces.
class InputError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public InputError {
 public:
  using InputError::InputError;
};

class ArgumentError : public InputError {
 public:
  using InputError::InputError;
};

class LookupError : public InputError {
 public:
  using InputError::InputError;
};

class EncodingError : public InputError {
 public:
  using InputError::InputError;
};

class PartitionError : public InputError {
 public:
  using InputError::InputError;
};

class TraceError : public InputError {
 public:
  using InputError::InputError;
};

class DecodeError : public InputError {
 public:
  using InputError::InputError;
};

// Malformed on-disk container. Carries the byte offset where parsing failed.
class FormatError : public InputError {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : InputError(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Numerical domain failures: non-SPD Hessians, nonpositive saliency weights.
class NumericError : public Error {
 public:
  using Error::Error;
};

// All-zero (or otherwise unusable) calibration activations.
class CalibrationError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace deltazip
