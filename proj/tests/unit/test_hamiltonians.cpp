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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "qrsi/error.hpp"
#include "qrsi/hamiltonians.hpp"
#include "qrsi/random.hpp"

using namespace qrsi;

namespace {

std::map<double, double> rounded_multiplicities(const RealVector& values) {
  std::map<double, double> out;
  for (Index k = 0; k < values.size(); ++k) out[std::round(values[k] * 1e6) / 1e6] += 1.0;
  return out;
}

int popcount(std::uint64_t v) { return __builtin_popcountll(v); }

}  // namespace

TEST_CASE("pauli sums agree with kronecker products") {
  Rng rng = make_stream(11, StreamDomain::rotation, 0);
  std::vector<PauliString> terms;
  ComplexMatrix expected = ComplexMatrix::Zero(16, 16);
  for (int t = 0; t < 6; ++t) {
    PauliString p{rng() & 15u, rng() & 15u, 0.5 + t};
    terms.push_back(p);
    expected += p.coefficient * oracle::pauli_kron(p.x_mask, p.z_mask, 4);
  }
  CHECK((assemble_pauli_sum(terms, 4) - expected).norm() < 1e-12);
}

TEST_CASE("toric stabilizers commute and multiply to the identity") {
  for (auto [lx, ly] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{2, 3}}) {
    ToricSpec spec;
    spec.lx = lx;
    spec.ly = ly;
    const auto terms = toric_stabilizers(spec);
    const std::size_t m = static_cast<std::size_t>(lx * ly);
    REQUIRE(terms.size() == 2 * m);
    std::uint64_t star_product = 0;
    std::uint64_t plaquette_product = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      CHECK(popcount(terms[i].x_mask | terms[i].z_mask) == 4);
      for (std::size_t j = 0; j < terms.size(); ++j) {
        // X^a Z^b and X^c Z^d commute iff |a & d| + |b & c| is even.
        const int anti = popcount(terms[i].x_mask & terms[j].z_mask) + popcount(terms[i].z_mask & terms[j].x_mask);
        CHECK(anti % 2 == 0);
      }
      if (i < m) star_product ^= terms[i].x_mask;
      else plaquette_product ^= terms[i].z_mask;
    }
    CHECK(star_product == 0);
    CHECK(plaquette_product == 0);
  }
}

TEST_CASE("2x2 toric spectrum matches the stabilizer-pattern count") {
  ToricSpec spec;
  const auto h = build_toric(spec);
  REQUIRE(h.dim() == 256);
  const auto got = rounded_multiplicities(h.eigen().values);
  const auto want = oracle::toric_spectrum(2, 2, 1.0, 1.0);
  CHECK(got == want);
  CHECK(want.at(-8.0) == 4.0);
  CHECK(want.at(0.0) == 152.0);
  // Flipping one stabilizer is forbidden by the product constraint, so the
  // first excitation costs two stars or two plaquettes.
  const auto ground = select_eigenspace(h, -8.0, 1e-8);
  CHECK(ground.degeneracy() == 4);
  CHECK(ground.gap == doctest::Approx(4.0));
  CHECK(h.frobenius_norm() == doctest::Approx(std::sqrt(8.0 * 256.0)));
}

TEST_CASE("anisotropic couplings shift the ground energy") {
  ToricSpec spec;
  spec.jp = 2.0;
  const auto h = build_toric(spec);
  CHECK(h.eigen().values[0] == doctest::Approx(-12.0));
  const auto ground = select_eigenspace(h, -12.0, 1e-8);
  CHECK(ground.degeneracy() == 4);
  CHECK(ground.gap == doctest::Approx(4.0));
  CHECK(rounded_multiplicities(h.eigen().values) == oracle::toric_spectrum(2, 2, 1.0, 2.0));
}

TEST_CASE("toric perturbation has the requested relative size and is reproducible") {
  ToricSpec spec;
  const auto clean = build_toric(spec);
  spec.perturbation_scale = 1e-3;
  spec.perturbation_seed = 5;
  const auto a = build_toric(spec);
  const auto b = build_toric(spec);
  CHECK((a.matrix() - b.matrix()).norm() == 0.0);
  CHECK((a.matrix() - clean.matrix()).norm() == doctest::Approx(1e-3 * clean.frobenius_norm()).epsilon(1e-9));
  CHECK((a.matrix() - a.matrix().transpose()).norm() == 0.0);
}

TEST_CASE("toric spec validation") {
  ToricSpec spec;
  spec.lx = 1;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec.lx = 4;
  spec.ly = 4;  // 32 qubits
  CHECK_THROWS_AS(build_toric(spec), ValidationError);
}

TEST_CASE("planted spectrum and ground basis") {
  for (Index g : {Index{6}, Index{11}}) {
    PlantedSpec spec;
    spec.degeneracy = g;
    spec.seed = 3;
    const auto h = build_planted(spec);
    const auto& e = h.eigen().values;
    for (Index k = 0; k < g; ++k) CHECK(std::abs(e[k] - spec.ground_energy) < 1e-12);
    CHECK(e[g] >= spec.ground_energy + spec.gap - 1e-12);
    const ComplexMatrix v = planted_ground_basis(spec.dim, g);
    CHECK((v.adjoint() * v - ComplexMatrix::Identity(g, g)).norm() < 1e-12);
    // The planted directions are exact null vectors of H - E0.
    CHECK((h.matrix() * v - spec.ground_energy * v).norm() < 1e-11);
    CHECK(select_eigenspace(h, spec.ground_energy, 1e-8).degeneracy() == g);
  }
}

TEST_CASE("planted spec validation") {
  PlantedSpec spec;
  spec.degeneracy = 0;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec.degeneracy = 256;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec.degeneracy = 4;
  spec.gap = 0.0;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("unstructured planted instance") {
  PlantedSpec spec;
  spec.dim = 32;
  spec.degeneracy = 3;
  spec.structured_ground = false;
  const auto h = build_planted(spec);
  CHECK(select_eigenspace(h, 0.0, 1e-8).degeneracy() == 3);
}

TEST_CASE("padding to a power of two") {
  PlantedSpec spec;
  spec.dim = 200;
  spec.degeneracy = 3;
  const auto h = build_planted(spec);
  CHECK(next_power_of_two(200) == 256);
  CHECK(next_power_of_two(256) == 256);
  CHECK(next_power_of_two(1) == 1);
  const double penalty = 10.0 * h.frobenius_norm();
  const auto padded = pad_to_qubits(h, penalty);
  CHECK(padded.physical_dim == 200);
  CHECK(padded.padded_dim == 256);
  const ComplexMatrix& m = padded.op.matrix();
  CHECK((m.topLeftCorner(200, 200) - h.matrix()).norm() == 0.0);
  CHECK(m.topRightCorner(200, 56).norm() == 0.0);
  CHECK((m.bottomRightCorner(56, 56) - penalty * ComplexMatrix::Identity(56, 56)).norm() == 0.0);
  const auto ground = select_eigenspace(padded.op, 0.0, 1e-8);
  CHECK(ground.degeneracy() == 3);
  CHECK(ground.basis.bottomRows(56).norm() < 1e-12);
  CHECK_THROWS_AS(pad_to_qubits(h, h.spectral_norm()), ValidationError);

  const auto toric = build_toric(ToricSpec{});
  const auto same = pad_to_qubits(toric, 1.0);
  CHECK(same.padded_dim == 256);
  CHECK(same.op.dim() == 256);
}

TEST_CASE("matrix files round-trip") {
  const auto h = build_planted(PlantedSpec{16, 2, 2.0, 0.0, 1, true});
  const auto dir = std::filesystem::temp_directory_path() / "qrsi_matrix_io";
  std::filesystem::create_directories(dir);
  write_matrix(dir / "h.qmat", h.matrix(), MatrixFormat::binary);
  CHECK((read_matrix(dir / "h.qmat") - h.matrix()).norm() == 0.0);
  write_matrix(dir / "h.csv", h.matrix(), MatrixFormat::csv);
  CHECK((read_matrix(dir / "h.csv") - h.matrix()).norm() == 0.0);
  std::ifstream csv(dir / "h.csv");
  std::string first;
  std::getline(csv, first);
  CHECK(first == "16,16");
  {
    std::ofstream bad(dir / "bad.csv");
    bad << "2,2\n1,0\n";
  }
  CHECK_THROWS_AS(read_matrix(dir / "bad.csv"), ValidationError);
}
