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

#include "qrsi/hamiltonians.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qrsi/error.hpp"
#include "qrsi/random.hpp"

namespace qrsi {

ComplexMatrix assemble_pauli_sum(std::span<const PauliString> terms, int qubits) {
  if (qubits < 0 || qubits > kMaxDenseQubits) {
    throw ValidationError("dense Pauli assembly supports at most " + std::to_string(kMaxDenseQubits) +
                          " qubits, got " + std::to_string(qubits));
  }
  const std::uint64_t dim = std::uint64_t{1} << qubits;
  const std::uint64_t mask = dim - 1;
  ComplexMatrix h = ComplexMatrix::Zero(static_cast<Index>(dim), static_cast<Index>(dim));
  for (const auto& term : terms) {
    if ((term.x_mask | term.z_mask) & ~mask) {
      throw ValidationError("Pauli string acts outside the register");
    }
    for (std::uint64_t b = 0; b < dim; ++b) {
      const double sign = (std::popcount(b & term.z_mask) & 1) ? -1.0 : 1.0;
      h(static_cast<Index>(b ^ term.x_mask), static_cast<Index>(b)) += sign * term.coefficient;
    }
  }
  return h;
}

void ToricSpec::validate() const {
  if (lx < 2 || ly < 2) throw ValidationError("toric lattice needs L_x, L_y >= 2");
  if (!(js > 0.0) || !(jp > 0.0)) throw ValidationError("toric couplings J_s, J_p must be positive");
  if (!(perturbation_scale >= 0.0)) throw ValidationError("perturbation_scale must be >= 0");
  if (qubits() > kMaxDenseQubits) {
    throw ValidationError("toric lattice " + std::to_string(lx) + "x" + std::to_string(ly) + " needs " +
                          std::to_string(qubits()) + " qubits; the dense cap is " +
                          std::to_string(kMaxDenseQubits));
  }
}

namespace {
int wrap(int value, int period) { return ((value % period) + period) % period; }
}  // namespace

int toric_horizontal_edge(const ToricSpec& spec, int x, int y) {
  return wrap(y, spec.ly) * spec.lx + wrap(x, spec.lx);
}

int toric_vertical_edge(const ToricSpec& spec, int x, int y) {
  return spec.lx * spec.ly + wrap(y, spec.ly) * spec.lx + wrap(x, spec.lx);
}

std::vector<PauliString> toric_stabilizers(const ToricSpec& spec) {
  spec.validate();
  std::vector<PauliString> terms;
  auto bit = [](int edge) { return std::uint64_t{1} << edge; };
  for (int y = 0; y < spec.ly; ++y) {
    for (int x = 0; x < spec.lx; ++x) {
      PauliString star;
      star.x_mask = bit(toric_horizontal_edge(spec, x, y)) | bit(toric_horizontal_edge(spec, x - 1, y)) |
                    bit(toric_vertical_edge(spec, x, y)) | bit(toric_vertical_edge(spec, x, y - 1));
      star.coefficient = -spec.js;
      terms.push_back(star);
    }
  }
  for (int y = 0; y < spec.ly; ++y) {
    for (int x = 0; x < spec.lx; ++x) {
      PauliString plaquette;
      plaquette.z_mask = bit(toric_horizontal_edge(spec, x, y)) | bit(toric_horizontal_edge(spec, x, y + 1)) |
                         bit(toric_vertical_edge(spec, x, y)) | bit(toric_vertical_edge(spec, x + 1, y));
      plaquette.coefficient = -spec.jp;
      terms.push_back(plaquette);
    }
  }
  return terms;
}

HermitianOperator build_toric(const ToricSpec& spec) {
  const auto terms = toric_stabilizers(spec);
  ComplexMatrix h = assemble_pauli_sum(terms, spec.qubits());
  if (spec.perturbation_scale > 0.0) {
    auto rng = make_stream(spec.perturbation_seed, StreamDomain::toric_perturbation, 0);
    std::normal_distribution<double> normal;
    const Index n = h.rows();
    Eigen::MatrixXd p(n, n);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i <= j; ++i) {
        p(i, j) = normal(rng);
        p(j, i) = p(i, j);
      }
    }
    p *= spec.perturbation_scale * h.norm() / p.norm();
    h += p.cast<Complex>();
  }
  return HermitianOperator(std::move(h));
}

void PlantedSpec::validate() const {
  if (degeneracy < 1) throw ValidationError("planted degeneracy must be >= 1");
  if (degeneracy >= dim) throw ValidationError("planted degeneracy must be smaller than the dimension");
  if (!(gap > 0.0)) throw ValidationError("planted gap must be positive");
  if (structured_ground && 2 * (degeneracy - 1) >= dim) {
    throw ValidationError("structured planted ground space needs 2(g-1) < d");
  }
}

ComplexMatrix planted_ground_basis(Index dim, Index degeneracy) {
  ComplexMatrix basis = ComplexMatrix::Zero(dim, degeneracy);
  basis.col(0).setConstant(Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
  for (Index j = 1; j < degeneracy; ++j) {
    basis(2 * j - 1, j) = M_SQRT1_2;
    basis(2 * j, j) = -M_SQRT1_2;
  }
  return basis;
}

HermitianOperator build_planted(const PlantedSpec& spec) {
  spec.validate();
  auto rng = make_stream(spec.seed, StreamDomain::planted, 0);
  const Index d = spec.dim;
  const Index g = spec.degeneracy;

  RealVector energies(d);
  energies.head(g).setConstant(spec.ground_energy);
  std::normal_distribution<double> normal;
  for (Index j = g; j < d; ++j) energies[j] = spec.ground_energy + spec.gap + std::abs(normal(rng));

  ComplexMatrix vectors;
  if (spec.structured_ground) {
    ComplexMatrix seed(d, d);
    seed.leftCols(g) = planted_ground_basis(d, g);
    for (Index j = g; j < d; ++j) {
      for (Index i = 0; i < d; ++i) seed(i, j) = complex_normal(rng);
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(seed);
    vectors = qr.householderQ();
    // Q spans the ground columns only up to phases; restore them exactly.
    vectors.leftCols(g) = seed.leftCols(g);
  } else {
    vectors = haar_unitary(rng, d);
  }
  return HermitianOperator::from_spectrum(vectors, energies);
}

Index next_power_of_two(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

PaddedOperator pad_to_qubits(const HermitianOperator& h, double penalty) {
  PaddedOperator padded{h.dim(), next_power_of_two(h.dim()), penalty, h};
  if (padded.padded_dim == padded.physical_dim) return padded;
  const double norm = h.spectral_norm();
  if (!(penalty > 10.0 * norm)) {
    throw ValidationError("padding penalty " + std::to_string(penalty) +
                          " is too small: it must exceed 10 * ||H|| = " + std::to_string(10.0 * norm));
  }
  ComplexMatrix m = ComplexMatrix::Zero(padded.padded_dim, padded.padded_dim);
  m.topLeftCorner(h.dim(), h.dim()) = h.matrix();
  const Index extra = padded.padded_dim - padded.physical_dim;
  m.bottomRightCorner(extra, extra).diagonal().setConstant(Complex(penalty, 0.0));
  padded.op = HermitianOperator(std::move(m));
  return padded;
}

}  // namespace qrsi
