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

#include "qrsi/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qrsi/error.hpp"

namespace qrsi {

namespace {

constexpr double kHermiticityTol = 1e-12;

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw ValidationError(std::string(what) + " has non-finite entries");
  }
}

}  // namespace

HermitianOperator::HermitianOperator(ComplexMatrix matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw ValidationError("Hermitian operator must be square, got " + std::to_string(matrix.rows()) +
                          "x" + std::to_string(matrix.cols()));
  }
  require_finite(matrix, "Hermitian operator");
  const double scale = matrix.norm();
  const double skew = (matrix - matrix.adjoint()).norm();
  if (skew > kHermiticityTol * scale) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian: ||H - H^dagger||_F = " << skew << " exceeds "
        << kHermiticityTol << " * ||H||_F = " << kHermiticityTol * scale;
    throw ValidationError(msg.str());
  }
  matrix_ = std::make_shared<const ComplexMatrix>(std::move(matrix));
  cache_ = std::make_shared<Cache>();
}

HermitianOperator HermitianOperator::from_spectrum(const ComplexMatrix& vectors,
                                                   const RealVector& values) {
  if (vectors.cols() != values.size() || vectors.rows() != vectors.cols()) {
    throw ValidationError("from_spectrum: need a square eigenvector matrix matching the eigenvalues");
  }
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values[a] < values[b]; });

  auto decomposition = std::make_unique<Eigendecomposition>();
  decomposition->values.resize(values.size());
  decomposition->vectors.resize(vectors.rows(), vectors.cols());
  for (Index k = 0; k < values.size(); ++k) {
    decomposition->values[k] = values[order[static_cast<std::size_t>(k)]];
    decomposition->vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }

  HermitianOperator op;
  op.matrix_ = std::make_shared<const ComplexMatrix>(hermitian_part(
      decomposition->vectors * decomposition->values.asDiagonal() * decomposition->vectors.adjoint()));
  op.cache_ = std::make_shared<Cache>();
  std::call_once(op.cache_->once, [&] { op.cache_->value = std::move(decomposition); });
  return op;
}

const Eigendecomposition& HermitianOperator::eigen() const {
  std::call_once(cache_->once, [this] {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(*matrix_);
    if (solver.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "Hermitian eigendecomposition did not converge (N = " << matrix_->rows()
          << ", ||H||_F = " << matrix_->norm() << ")";
      throw NumericalError(msg.str());
    }
    cache_->value = std::make_unique<const Eigendecomposition>(
        Eigendecomposition{solver.eigenvalues(), solver.eigenvectors()});
  });
  return *cache_->value;
}

bool HermitianOperator::has_eigen() const { return cache_->value != nullptr; }

double HermitianOperator::spectral_norm() const {
  const auto& values = eigen().values;
  if (values.size() == 0) return 0.0;
  return std::max(std::abs(values[0]), std::abs(values[values.size() - 1]));
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return (a + a.adjoint()) * 0.5; }

const Eigendecomposition& hermitian_eigendecomposition(const HermitianOperator& h) { return h.eigen(); }

RealVector singular_values(const ComplexMatrix& a) {
  require_finite(a, "singular_values input");
  if (a.size() == 0) return RealVector(0);
  // BDCSVD switches to one-sided Jacobi below its block size.
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues();
}

double singular_guard(const HermitianOperator& h) {
  return std::max(1e-8 * h.spectral_norm(), 1e-300);
}

ComplexVector solve_shifted(const HermitianOperator& h, double sigma, const ComplexVector& b) {
  if (b.size() != h.dim()) {
    throw ValidationError("solve_shifted: right-hand side has length " + std::to_string(b.size()) +
                          ", operator has dimension " + std::to_string(h.dim()));
  }
  const auto& eig = h.eigen();
  const double min_distance = (eig.values.array() - sigma).abs().minCoeff();
  if (min_distance < singular_guard(h)) {
    throw NearSingularShift(sigma, min_distance);
  }
  ComplexVector coords = eig.vectors.adjoint() * b;
  coords.array() /= (eig.values.array() - sigma).cast<Complex>();
  return eig.vectors * coords;
}

ComplexVector matrix_function_apply(const HermitianOperator& h,
                                    const std::function<double(double)>& f,
                                    const ComplexVector& v) {
  if (v.size() != h.dim()) {
    throw ValidationError("matrix_function_apply: vector length does not match operator dimension");
  }
  const auto& eig = h.eigen();
  ComplexVector coords = eig.vectors.adjoint() * v;
  for (Index k = 0; k < coords.size(); ++k) {
    const double fk = f(eig.values[k]);
    if (!std::isfinite(fk)) {
      std::ostringstream msg;
      msg << "matrix function is non-finite at eigenvalue " << eig.values[k];
      throw NumericalError(msg.str());
    }
    coords[k] *= fk;
  }
  return eig.vectors * coords;
}

double default_cluster_tol(const HermitianOperator& h) { return 1e-8 * h.spectral_norm(); }

EigenspaceHandle select_eigenspace(const HermitianOperator& h, double energy, double cluster_tol) {
  const auto& eig = h.eigen();
  const auto& values = eig.values;
  EigenspaceHandle handle;
  handle.energy = energy;
  double nearest = std::numeric_limits<double>::quiet_NaN();
  double nearest_distance = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < values.size(); ++k) {
    const double distance = std::abs(values[k] - energy);
    if (distance <= cluster_tol) handle.indices.push_back(k);
    if (distance < nearest_distance) {
      nearest_distance = distance;
      nearest = values[k];
    }
  }
  if (handle.indices.empty()) throw NoLevelNear(energy, nearest);

  const Index first = handle.indices.front();
  const Index last = handle.indices.back();
  handle.basis.resize(h.dim(), handle.degeneracy());
  for (Index j = 0; j < handle.degeneracy(); ++j) {
    handle.basis.col(j) = eig.vectors.col(handle.indices[static_cast<std::size_t>(j)]);
  }
  if (first > 0) handle.gap = std::min(handle.gap, values[first] - values[first - 1]);
  if (last + 1 < values.size()) handle.gap = std::min(handle.gap, values[last + 1] - values[last]);
  return handle;
}

std::vector<LevelCluster> cluster_levels(const RealVector& ascending, double tol) {
  std::vector<LevelCluster> clusters;
  Index begin = 0;
  for (Index k = 1; k <= ascending.size(); ++k) {
    if (k == ascending.size() || ascending[k] - ascending[k - 1] > tol) {
      if (k > begin) {
        clusters.push_back({begin, k, ascending.segment(begin, k - begin).mean()});
      }
      begin = k;
    }
  }
  return clusters;
}

}  // namespace qrsi
