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

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

namespace qrsi {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Eigendecomposition {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // columns are eigenvectors
};

/// Dense Hermitian matrix with a lazily computed, write-once
/// eigendecomposition. Copies share both the (immutable) matrix and the
/// cache, so a decomposition computed through any copy is visible to all.
class HermitianOperator {
 public:
  /// Validates finiteness and Hermiticity within 1e-12 * ||H||_F.
  explicit HermitianOperator(ComplexMatrix matrix);

  /// Builds V diag(values) V^dagger and seeds the cache with the sorted
  /// decomposition. `vectors` must have orthonormal columns.
  static HermitianOperator from_spectrum(const ComplexMatrix& vectors, const RealVector& values);

  Index dim() const { return matrix_->rows(); }
  const ComplexMatrix& matrix() const { return *matrix_; }
  double frobenius_norm() const { return matrix_->norm(); }

  /// Computes on first use; safe to call concurrently.
  const Eigendecomposition& eigen() const;
  bool has_eigen() const;

  /// max |E_k|, from the eigendecomposition.
  double spectral_norm() const;

 private:
  struct Cache {
    std::once_flag once;
    std::unique_ptr<const Eigendecomposition> value;
  };

  HermitianOperator() = default;

  std::shared_ptr<const ComplexMatrix> matrix_;
  std::shared_ptr<Cache> cache_;
};

/// Projects onto the Hermitian part, (A + A^dagger) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& a);

const Eigendecomposition& hermitian_eigendecomposition(const HermitianOperator& h);

/// Descending singular values, min(rows, cols) of them.
RealVector singular_values(const ComplexMatrix& a);

/// Radius below which a shift counts as sitting on an eigenvalue:
/// 1e-8 * ||H||_2 (floored at 1e-300 for the zero operator).
double singular_guard(const HermitianOperator& h);

/// Solves (H - sigma I) x = b through the eigendecomposition. Throws
/// NearSingularShift when min_k |E_k - sigma| < singular_guard(h).
ComplexVector solve_shifted(const HermitianOperator& h, double sigma, const ComplexVector& b);

/// V f(Lambda) V^dagger v. Throws NumericalError if f is non-finite on
/// any eigenvalue.
ComplexVector matrix_function_apply(const HermitianOperator& h,
                                    const std::function<double(double)>& f,
                                    const ComplexVector& v);

struct EigenspaceHandle {
  double energy = 0.0;
  std::vector<Index> indices;  // into the ascending eigenvalue array
  ComplexMatrix basis;         // N x g, orthonormal columns
  double gap = std::numeric_limits<double>::infinity();

  Index degeneracy() const { return static_cast<Index>(indices.size()); }
};

/// 1e-8 * ||H||_2.
double default_cluster_tol(const HermitianOperator& h);

/// All eigenvalues with |E_k - energy| <= cluster_tol. The gap is the
/// distance from the selected cluster to the nearest eigenvalue outside it
/// (infinity if there is none). Throws NoLevelNear on an empty cluster.
EigenspaceHandle select_eigenspace(const HermitianOperator& h, double energy, double cluster_tol);

/// Contiguous run [begin, end) of an ascending spectrum, linked by
/// consecutive differences <= tol.
struct LevelCluster {
  Index begin = 0;
  Index end = 0;
  double center = 0.0;  // arithmetic mean of the member eigenvalues

  Index size() const { return end - begin; }
};

std::vector<LevelCluster> cluster_levels(const RealVector& ascending, double tol);

}  // namespace qrsi
