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

#include "qrsi/rotations.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "qrsi/error.hpp"
#include "qrsi/random.hpp"

namespace qrsi {

std::string to_string(RotationKind kind) {
  switch (kind) {
    case RotationKind::haar: return "haar";
    case RotationKind::givens: return "givens";
    case RotationKind::householder: return "householder";
    case RotationKind::permutation: return "permutation";
    case RotationKind::identity: return "identity";
  }
  return "unknown";
}

RotationKind parse_rotation_kind(const std::string& name) {
  for (auto kind : {RotationKind::haar, RotationKind::givens, RotationKind::householder,
                    RotationKind::permutation, RotationKind::identity}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("unknown rotation kind '" + name + "'");
}

Index RotationSpec::resolved_givens_count() const {
  if (givens_count) return *givens_count;
  const double n = static_cast<double>(physical_dim);
  return physical_dim < 2 ? 0 : static_cast<Index>(std::ceil(10.0 * n * std::log2(n)));
}

Index RotationSpec::resolved_householder_count() const {
  return householder_count ? *householder_count : physical_dim;
}

void RotationSpec::validate() const {
  if (physical_dim < 1) throw ValidationError("rotation physical dimension must be >= 1");
  const Index padded = resolved_padded_dim();
  if (padded < physical_dim || (padded & (padded - 1)) != 0) {
    throw ValidationError("rotation padded dimension must be a power of two >= the physical dimension");
  }
  if (givens_count && *givens_count < 0) throw ValidationError("givens count must be >= 0");
  if (householder_count && *householder_count < 0) throw ValidationError("householder count must be >= 0");
  if (kind == RotationKind::givens && physical_dim < 2 && resolved_givens_count() > 0) {
    throw ValidationError("givens rotations need a physical dimension >= 2");
  }
}

BlockRotation::BlockRotation(ComplexMatrix physical, Index padded_dim)
    : physical_(std::move(physical)), padded_dim_(padded_dim) {
  if (physical_.rows() != physical_.cols() || padded_dim_ < physical_.rows()) {
    throw ValidationError("block rotation needs a square physical block no larger than the padded space");
  }
}

BlockRotation BlockRotation::identity(Index physical_dim, Index padded_dim) {
  return BlockRotation(ComplexMatrix::Identity(physical_dim, physical_dim), padded_dim);
}

void BlockRotation::check_dim(Index n) const {
  if (n != padded_dim_) {
    throw ValidationError("rotation acts on dimension " + std::to_string(padded_dim_) + ", got " +
                          std::to_string(n));
  }
}

ComplexVector BlockRotation::apply(const ComplexVector& v) const {
  check_dim(v.size());
  ComplexVector out = v;
  out.head(physical_dim()) = physical_ * v.head(physical_dim());
  return out;
}

ComplexVector BlockRotation::apply_inverse(const ComplexVector& v) const {
  check_dim(v.size());
  ComplexVector out = v;
  out.head(physical_dim()) = physical_.adjoint() * v.head(physical_dim());
  return out;
}

HermitianOperator BlockRotation::conjugate(const HermitianOperator& h) const {
  check_dim(h.dim());
  const Index n = physical_dim();
  const Index rest = padded_dim_ - n;
  const auto& m = h.matrix();
  ComplexMatrix out(padded_dim_, padded_dim_);
  ComplexMatrix hp = m.topLeftCorner(n, n) * physical_;
  out.topLeftCorner(n, n).noalias() = physical_.adjoint() * hp;
  if (rest > 0) {
    out.topRightCorner(n, rest).noalias() = physical_.adjoint() * m.topRightCorner(n, rest);
    out.bottomLeftCorner(rest, n).noalias() = m.bottomLeftCorner(rest, n) * physical_;
    out.bottomRightCorner(rest, rest) = m.bottomRightCorner(rest, rest);
  }
  return HermitianOperator(hermitian_part(out));
}

ComplexMatrix BlockRotation::dense() const {
  ComplexMatrix out = ComplexMatrix::Identity(padded_dim_, padded_dim_);
  out.topLeftCorner(physical_dim(), physical_dim()) = physical_;
  return out;
}

namespace {

// Each factor mixes rows (i, j) by
// [[cos t, e^{i phi} sin t], [-e^{-i phi} sin t, cos t]].
ComplexMatrix sample_givens(Rng& rng, Index n, Index count) {
  // Row-major storage keeps the two touched rows contiguous.
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m =
      ComplexMatrix::Identity(n, n);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (Index l = 0; l < count; ++l) {
    const Index i = pick(rng);
    Index j = pick(rng);
    while (j == i) j = pick(rng);
    const double theta = angle(rng);
    const double phi = angle(rng);
    const double c = std::cos(theta);
    const double sr = std::sin(theta) * std::cos(phi);
    const double si = std::sin(theta) * std::sin(phi);
    // Interleaved (re, im) doubles; spelled out so the loop vectorizes
    // instead of going through the checked complex multiply.
    double* ri = reinterpret_cast<double*>(m.row(i).data());
    double* rj = reinterpret_cast<double*>(m.row(j).data());
    for (Index col = 0; col < n; ++col) {
      const double ar = ri[2 * col], ai = ri[2 * col + 1];
      const double br = rj[2 * col], bi = rj[2 * col + 1];
      ri[2 * col] = c * ar + sr * br - si * bi;
      ri[2 * col + 1] = c * ai + sr * bi + si * br;
      rj[2 * col] = c * br - sr * ar - si * ai;
      rj[2 * col + 1] = c * bi - sr * ai + si * ar;
    }
  }
  return m;
}

ComplexMatrix sample_householder(Rng& rng, Index n, Index count) {
  ComplexMatrix m = ComplexMatrix::Identity(n, n);
  for (Index l = 0; l < count; ++l) {
    const ComplexVector u = random_unit_vector(rng, n);
    // M <- (I - 2 u u^dagger) M
    const Eigen::RowVectorXcd projection = u.adjoint() * m;
    m.noalias() -= 2.0 * u * projection;
  }
  return m;
}

ComplexMatrix sample_permutation(Rng& rng, Index n) {
  std::vector<Index> image(static_cast<std::size_t>(n));
  std::iota(image.begin(), image.end(), Index{0});
  for (Index k = n - 1; k > 0; --k) {
    std::uniform_int_distribution<Index> pick(0, k);
    std::swap(image[static_cast<std::size_t>(k)], image[static_cast<std::size_t>(pick(rng))]);
  }
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) m(image[static_cast<std::size_t>(j)], j) = 1.0;
  return m;
}

}  // namespace

BlockRotation sample_rotation(const RotationSpec& spec, std::uint64_t branch_index) {
  spec.validate();
  const Index n = spec.physical_dim;
  auto rng = make_stream(spec.master_seed, StreamDomain::rotation, branch_index);
  ComplexMatrix physical;
  switch (spec.kind) {
    case RotationKind::identity: physical = ComplexMatrix::Identity(n, n); break;
    case RotationKind::haar: physical = haar_unitary(rng, n); break;
    case RotationKind::givens: physical = sample_givens(rng, n, spec.resolved_givens_count()); break;
    case RotationKind::householder:
      physical = sample_householder(rng, n, spec.resolved_householder_count());
      break;
    case RotationKind::permutation: physical = sample_permutation(rng, n); break;
  }
  return BlockRotation(std::move(physical), spec.resolved_padded_dim());
}

}  // namespace qrsi
