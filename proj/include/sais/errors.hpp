// Copyright 2026 The SAIS Authors
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

#ifndef SAIS_ERRORS_HPP
#define SAIS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sais {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument value (non-finite input, out-of-range stage, bad parameter).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Shape mismatch between objects that must agree (dimensions, lengths).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Every weight of a cloud is zero, so nothing can be normalized or resampled.
class DegenerateCloudError : public Error {
 public:
  using Error::Error;
};

/// Operation requested on a target family that does not support it.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or results file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace sais

#endif  // SAIS_ERRORS_HPP
