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
#include <filesystem>
#include <span>
#include <vector>

#include "qrsi/linalg.hpp"

namespace qrsi {

/// coefficient * X^{x_mask} Z^{z_mask}; bit q of a mask acts on qubit q,
/// which is bit q of the computational-basis index. The Z factor acts
/// first: the term maps |b> to coefficient * (-1)^{|b & z_mask|} |b ^ x_mask>.
struct PauliString {
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;
  double coefficient = 1.0;
};

/// Dense sum of Pauli strings on `qubits` qubits, built by bit manipulation
/// on basis indices (O(2^n) per term).
ComplexMatrix assemble_pauli_sum(std::span<const PauliString> terms, int qubits);

inline constexpr int kMaxDenseQubits = 14;

/// Periodic L_x x L_y toric code with one qubit per edge.
///
/// Edge numbering: horizontal edges first, row-major, then vertical edges,
/// row-major. The horizontal edge (x, y) joins vertices (x, y) and (x+1, y)
/// and has index y*L_x + x; the vertical edge (x, y) joins (x, y) and
/// (x, y+1) and has index L_x*L_y + y*L_x + x. Coordinates wrap.
struct ToricSpec {
  int lx = 2;
  int ly = 2;
  double js = 1.0;
  double jp = 1.0;
  /// Relative Frobenius norm of the real-symmetric perturbation; 0 disables it.
  double perturbation_scale = 0.0;
  std::uint64_t perturbation_seed = 0;

  int qubits() const { return 2 * lx * ly; }
  void validate() const;
};

int toric_horizontal_edge(const ToricSpec& spec, int x, int y);
int toric_vertical_edge(const ToricSpec& spec, int x, int y);

/// Star terms -J_s A_s for every vertex (row-major), followed by plaquette
/// terms -J_p B_p for every face (row-major).
std::vector<PauliString> toric_stabilizers(const ToricSpec& spec);

HermitianOperator build_toric(const ToricSpec& spec);

/// Random Hermitian matrix V diag(e) V^dagger with a g-fold level at
/// ground_energy and the remaining levels at ground_energy + gap + |z_j|,
/// z_j standard normal.
///
/// With structured_ground the ground space is spanned by the uniform
/// superposition and the sparse vectors (|2j-1> - |2j>)/sqrt(2),
/// j = 1..g-1; the excited eigenvectors complete this set from random
/// complex vectors. Otherwise the whole eigenbasis is Haar random.
struct PlantedSpec {
  Index dim = 256;
  Index degeneracy = 6;
  double gap = 2.0;
  double ground_energy = 0.0;
  std::uint64_t seed = 0;
  bool structured_ground = true;

  void validate() const;
};

HermitianOperator build_planted(const PlantedSpec& spec);

/// Structured ground basis of a planted instance (dim x g).
ComplexMatrix planted_ground_basis(Index dim, Index degeneracy);

struct PaddedOperator {
  Index physical_dim = 0;
  Index padded_dim = 0;
  double penalty = 0.0;
  HermitianOperator op;
};

Index next_power_of_two(Index n);

/// Embeds H in the smallest power-of-two dimension as diag(H, penalty * I).
/// Throws ValidationError unless penalty > 10 * ||H||_2.
PaddedOperator pad_to_qubits(const HermitianOperator& h, double penalty);

enum class MatrixFormat { binary, csv };

/// Binary layout: 8-byte magic "QRSIMAT1", little-endian uint64 rows and
/// cols, then rows*cols (re, im) IEEE-754 double pairs in row-major order.
/// CSV layout: a "rows,cols" line, then one "re,im" line per entry in
/// row-major order with 17 significant digits.
void write_matrix(const std::filesystem::path& path, const ComplexMatrix& m, MatrixFormat format);

/// Reads either format (detected by the magic bytes).
ComplexMatrix read_matrix(const std::filesystem::path& path);

}  // namespace qrsi
