// Copyright 2026 The seqmodel Authors.
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

#ifndef SEQMODEL_ERROR_H_
#define SEQMODEL_ERROR_H_

#include <stdexcept>
#include <string>

namespace seqmodel {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad game structure, dimension mismatch, unknown label,
// configuration outside its invariants.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an algorithm does not hold (e.g. a Dirichlet
// exponent below 1 handed to the FMAP solver).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Objective evaluated outside its domain (non-positive sequence weight).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: empty feasible set, inner solver non-convergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace seqmodel

#endif  // SEQMODEL_ERROR_H_
