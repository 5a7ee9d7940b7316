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

#include <cstdint>
#include <random>

#include "qrsi/linalg.hpp"

namespace qrsi {

/// Independent consumers of randomness. Each (master seed, domain, index)
/// triple maps to its own generator, so results never depend on the order
/// in which streams are drawn.
enum class StreamDomain : std::uint64_t {
  rotation = 1,
  toric_perturbation = 2,
  planted = 3,
  gram_noise = 4,
  hyperplanes = 5,
  serial_rotation = 6,
  test_directions = 7,
};

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t stream_seed(std::uint64_t master, StreamDomain domain, std::uint64_t index);

Rng make_stream(std::uint64_t master, StreamDomain domain, std::uint64_t index);

/// Circularly symmetric complex normal with E|z|^2 = 1.
Complex complex_normal(Rng& rng);

ComplexVector random_unit_vector(Rng& rng, Index dim);

/// Haar-random U(n): QR of a complex Ginibre matrix with the phases of the
/// triangular factor's diagonal moved into Q (plain QR is not Haar).
ComplexMatrix haar_unitary(Rng& rng, Index n);

}  // namespace qrsi
