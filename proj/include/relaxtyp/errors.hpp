// Copyright 2026 The relaxtyp Authors
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

namespace relaxtyp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Numerical failures: the generator cannot be handled by the spectral path.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NonDiagonalizable : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// More than one eigenvalue sits at zero (multistable generator).
class DegenerateSteadyState : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// First-order perturbation theory was asked for a mode inside a degenerate cluster.
class DegenerateMode : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class GapClosed : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotReached : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EmptyTypicalSet : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateFit : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RateProfileViolation : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// A proven inequality failed numerically. Seeing this means a bug, not a physics result.
class BoundViolated : public Error {
public:
    using Error::Error;
};

} // namespace relaxtyp
