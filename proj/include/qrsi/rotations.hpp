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

#include "qrsi/linalg.hpp"

namespace qrsi {

enum class RotationKind { haar, givens, householder, permutation, identity };

std::string to_string(RotationKind kind);
RotationKind parse_rotation_kind(const std::string& name);

struct RotationSpec {
  RotationKind kind = RotationKind::haar;
  Index physical_dim = 0;
  /// Power of two >= physical_dim; 0 means "same as physical_dim".
  Index padded_dim = 0;
  std::uint64_t master_seed = 0;
  /// Number of Givens factors; defaults to ceil(10 N log2 N).
  std::optional<Index> givens_count;
  /// Number of Householder reflections; defaults to N.
  std::optional<Index> householder_count;

  Index resolved_padded_dim() const { return padded_dim == 0 ? physical_dim : padded_dim; }
  Index resolved_givens_count() const;
  Index resolved_householder_count() const;
  void validate() const;
};

/// Unitary diag(P, I) on the padded space, P in U(N) on the physical block.
class BlockRotation {
 public:
  BlockRotation(ComplexMatrix physical, Index padded_dim);

  static BlockRotation identity(Index physical_dim, Index padded_dim);

  const ComplexMatrix& physical() const { return physical_; }
  Index physical_dim() const { return physical_.rows(); }
  Index padded_dim() const { return padded_dim_; }

  ComplexVector apply(const ComplexVector& v) const;
  ComplexVector apply_inverse(const ComplexVector& v) const;

  /// R^dagger H R.
  HermitianOperator conjugate(const HermitianOperator& h) const;

  ComplexMatrix dense() const;

 private:
  void check_dim(Index n) const;

  ComplexMatrix physical_;
  Index padded_dim_;
};

/// Deterministic in (spec, branch_index): each branch draws from its own
/// stream derived from the master seed.
BlockRotation sample_rotation(const RotationSpec& spec, std::uint64_t branch_index);

}  // namespace qrsi
