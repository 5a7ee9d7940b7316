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

#include "qrsi/random.hpp"

#include <cmath>

namespace qrsi {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, StreamDomain domain, std::uint64_t index) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ static_cast<std::uint64_t>(domain));
  return mix64(h ^ index);
}

Rng make_stream(std::uint64_t master, StreamDomain domain, std::uint64_t index) {
  return Rng(stream_seed(master, domain, index));
}

Complex complex_normal(Rng& rng) {
  std::normal_distribution<double> normal(0.0, M_SQRT1_2);
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

ComplexVector random_unit_vector(Rng& rng, Index dim) {
  ComplexVector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = complex_normal(rng);
  return v / v.norm();
}

ComplexMatrix haar_unitary(Rng& rng, Index n) {
  ComplexMatrix ginibre(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) ginibre(i, j) = complex_normal(rng);
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(ginibre);
  ComplexMatrix q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double magnitude = std::abs(d);
    if (magnitude > 0.0) q.col(j) *= d / magnitude;
  }
  return q;
}

}  // namespace qrsi
