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
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "qrsi/linalg.hpp"

namespace qrsi {

/// normalize(exp(-beta (H - E_min)) seed). `steps` only records the
/// discrete-step count a hardware implementation would use; the
/// propagator itself is applied exactly.
struct ImaginaryTime {
  double beta = 1.0;
  std::optional<int> steps;
};

/// normalize((mu I - H)^q seed). Without an explicit mu the shift is the
/// midpoint of the unwanted band [E_{g+1}, E_max], which minimizes the
/// worst per-step ratio |mu - E_k| / |mu - E_0| over the excited levels.
struct PowerFilter {
  int q = 1;
  std::optional<double> mu;
};

/// normalize(T_k(A) seed), A the affine map of the band [a, b] onto
/// [-1, 1]. The default band is [E_{g+1}, E_max] pulled 1% inward.
struct ChebyshevFilter {
  int degree = 8;
  std::optional<std::pair<double, double>> band;
};

/// q successive normalized solves of (H - sigma I) x = v.
struct ShiftInvert {
  double sigma = 0.0;
  int q = 1;
};

using BaseFilter = std::variant<ImaginaryTime, PowerFilter, ChebyshevFilter, ShiftInvert>;

/// Runs `inner` as a ground-state filter on (H - sigma I)^2.
struct FoldedSpectrum {
  double sigma = 0.0;
  BaseFilter inner;
};

using Filter = std::variant<ImaginaryTime, PowerFilter, ChebyshevFilter, ShiftInvert, FoldedSpectrum>;

std::string filter_name(const Filter& filter);
std::string filter_name(const BaseFilter& filter);

enum class SeedKind { basis_state, given_vector, uniform_superposition };

struct SeedPolicy {
  SeedKind kind = SeedKind::basis_state;
  Index index = 0;
  ComplexVector vector;  // given_vector only
};

std::string to_string(SeedKind kind);
SeedKind parse_seed_kind(const std::string& name);

struct PrimitiveSpec {
  Filter filter = ShiftInvert{};
  SeedPolicy seed;
  /// Use Gershgorin bounds instead of the exact spectrum for the
  /// imaginary-time reference energy and the default power shift.
  bool oracle_free = false;
  /// Clustering tolerance for locating E_{g+1}; default 1e-8 ||H||.
  std::optional<double> cluster_tol;

  void validate() const;
};

/// Seed on the padded space: supported on the first `physical_dim`
/// coordinates, zero on the padding block.
ComplexVector make_seed(const SeedPolicy& policy, Index physical_dim, Index total_dim);

/// Applies the filter to `seed` on `h` and returns a unit vector.
/// Throws ValidationError on a zero seed or a degenerate Chebyshev band,
/// NumericalError if the filter annihilates the seed.
ComplexVector prepare(const HermitianOperator& h, const ComplexVector& seed, const PrimitiveSpec& spec);

/// The shift actually used by shift-and-invert: sigma itself, or, when it
/// lies within singular_guard(h) of an eigenvalue, moved that far off the
/// level towards the midpoint of the gap to the nearest other level.
double guarded_shift(const HermitianOperator& h, double sigma, double cluster_tol);

/// Row-sum bounds on the spectrum.
double gershgorin_lower_bound(const ComplexMatrix& m);
double gershgorin_upper_bound(const ComplexMatrix& m);

/// Chebyshev polynomial T_k(t) as (log|T_k|, sign); exact for |t| <= 1 and
/// overflow-free outside.
std::pair<double, double> chebyshev_log_value(int k, double t);

/// 1 - ||V_g^dagger c||^2 for unit c, evaluated as ||(I - V_g V_g^dagger) c||^2.
double leakage(const ComplexVector& c, const EigenspaceHandle& target);

struct FootPoint {
  ComplexVector direction;  // normalize(V_g^dagger c), or zeros when orthogonal
  double alpha = 0.0;       // ||V_g^dagger c||
  bool orthogonal = false;  // alpha < 1e-14
};

FootPoint foot_point(const ComplexVector& c, const EigenspaceHandle& target);

struct BranchResult {
  std::uint64_t branch_index = 0;
  std::uint64_t rotation_seed = 0;
  ComplexVector coefficients;
  double epsilon = 1.0;
  ComplexVector foot_point;
  double alpha = 0.0;
  bool orthogonal = false;
  /// max_k |E_k(H_i) - E_k(H)|; NaN unless the branch rotated H.
  double spectral_deviation = 0.0;
};

}  // namespace qrsi
