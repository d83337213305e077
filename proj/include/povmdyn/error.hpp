// Copyright 2026 The povmdyn Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace povmdyn {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or block dimensions that do not fit together.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An argument outside the mathematical domain of the operation
/// (non-PSD input to a square root, zero-probability outcome, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Eigensolver failure, non-finite entries, or an iterative routine that
/// ran out of budget where the caller needs a hard answer.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

/// Exhaustive searches that would exceed their combinatorial cap.
class CombinatorialLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace povmdyn
