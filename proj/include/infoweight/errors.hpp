//
// Copyright 2026 The infoweight Authors
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
//

#ifndef INFOWEIGHT_ERRORS_HPP_
#define INFOWEIGHT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace infoweight {

// Invalid argument to a library operation.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid or inadmissible configuration (harness exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Base of all numerical failures (harness exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnsupportedOracleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace infoweight

#endif  // INFOWEIGHT_ERRORS_HPP_
