// Copyright 2026 The Carnot Lab Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace carnot {

/// Base of every error thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: expressions, scenario files, CLI arguments.
class InputError : public Error
{
public:
  using Error::Error;
};

class ParseError : public InputError
{
public:
  ParseError(const std::string & what, std::size_t offset)
      : InputError(what + " at byte " + std::to_string(offset)), offset_(offset)
  {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

class DimensionError : public InputError
{
public:
  using InputError::InputError;
};

/// Numerical failure: non-finite values, tolerances that cannot be met, solvers that do not
/// converge.
class NumericalError : public Error
{
public:
  using Error::Error;
};

class DomainError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

/// Every n-tuple determinant vanishes at the point: the bracket-generating condition fails there.
class HormanderError : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

/// A distance estimator could not connect the points within its radius budget.
class NoPathFound : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

/// No radius level of the ball-box proxy reaches the target point.
class OutOfRange : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

}  // namespace carnot
