// Copyright 2026 The QRSI Authors
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

namespace qrsi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: non-Hermitian matrices, out-of-range parameters,
/// mismatched dimensions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation that could not produce a trustworthy result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Bad experiment configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Shift lies within the singular guard of an eigenvalue.
class NearSingularShift : public NumericalError {
 public:
  NearSingularShift(double shift, double min_distance)
      : NumericalError("shift " + std::to_string(shift) +
                       " is within the singular guard: min |E_k - sigma| = " +
                       std::to_string(min_distance)),
        shift(shift),
        min_distance(min_distance) {}

  double shift;
  double min_distance;
};

class NoLevelNear : public Error {
 public:
  NoLevelNear(double energy, double nearest)
      : Error("no level near E = " + std::to_string(energy) +
              " (nearest eigenvalue " + std::to_string(nearest) + ")"),
        energy(energy),
        nearest(nearest) {}

  double energy;
  double nearest;
};

/// Every branch came back with zero overlap on the target eigenspace.
class DegenerateEnsemble : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qrsi
