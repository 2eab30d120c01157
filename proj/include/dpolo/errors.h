// Copyright 2026 The dpolo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPOLO_ERRORS_H_
#define DPOLO_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dpolo {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (e.g. mismatched dimensions).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed numeric input such as NaN or infinite entries.
class InputError : public Error {
 public:
  using Error::Error;
};

// Invalid distribution or privacy parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Out-of-order or over-horizon use of a sequential protocol object.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// An input violated a bound the privacy guarantee depends on.
class PrivacyContractError : public Error {
 public:
  using Error::Error;
};

// A (set, regularizer) or (setting, algorithm) pair with no implementation.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment or audit configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An iterative solver failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dpolo

#endif  // DPOLO_ERRORS_H_
