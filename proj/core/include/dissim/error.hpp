// Copyright 2026 The dissim Authors
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

namespace dissim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or precondition violation detected at an API boundary.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Problem size exceeds a configured capacity (dense Hilbert-space cap, memory budget).
class CapacityError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// The attractor is not unique: the null space of the generator has dimension > 1.
class DegenerateError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

// Fixed-point iteration settled into an oscillation instead of a fixed point.
class LimitCycleError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

// Adaptive step size fell below the configured minimum.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dissim
