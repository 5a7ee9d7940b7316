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

#include "qrsi/engine.hpp"
#include "qrsi/error.hpp"
#include "qrsi/hamiltonians.hpp"

using namespace qrsi;

namespace {

const HermitianOperator& toric() {
  static const HermitianOperator h = build_toric(ToricSpec{});
  return h;
}

QrsiConfig toric_config(Filter filter = ShiftInvert{-8.0, 4}) {
  QrsiConfig cfg;
  cfg.branches = 20;
  cfg.rotation.physical_dim = 256;
  cfg.rotation.master_seed = 31;
  cfg.primitive.filter = std::move(filter);
  cfg.target_energy = -8.0;
  cfg.threshold = ThresholdPolicy::largest_log_gap();
  cfg.threads = 1;
  return cfg;
}

const EnsembleReport& toric_report() {
  static const EnsembleReport r = run_qrsi(toric(), toric_config());
  return r;
}

RealVector vec(std::initializer_list<double> xs) {
  RealVector v(static_cast<Index>(xs.size()));
  Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

}  // namespace

TEST_CASE("detect_rank policies") {
  CHECK(detect_rank(vec({1.0, 1.0, 1e-12}), ThresholdPolicy::relative(1e-6)).g_hat == 2);
  const auto gap = detect_rank(vec({5.0, 4.0, 3.0, 2e-9, 1e-9}), ThresholdPolicy::largest_log_gap());
  CHECK(gap.g_hat == 3);
  CHECK(gap.tau_applied == doctest::Approx(std::sqrt(3.0 * 2e-9)));
  CHECK(detect_rank(vec({5.0, 4.0, 0.5}), ThresholdPolicy::fixed(1.0)).g_hat == 2);
  // Ties go to the smallest index.
  CHECK(detect_rank(vec({100.0, 10.0, 1.0}), ThresholdPolicy::largest_log_gap()).g_hat == 1);
  CHECK(detect_rank(vec({2.0}), ThresholdPolicy::largest_log_gap()).g_hat == 1);
}

TEST_CASE("detect_rank edge cases") {
  const auto zero = detect_rank(vec({0.0, 0.0}), ThresholdPolicy::largest_log_gap());
  CHECK(zero.g_hat == 0);
  CHECK(zero.below_threshold);
  const auto none = detect_rank(vec({0.5, 0.1}), ThresholdPolicy::fixed(1.0));
  CHECK(none.g_hat == 0);
  CHECK(none.below_threshold);
  CHECK_THROWS_AS(detect_rank(RealVector(), ThresholdPolicy::largest_log_gap()), ValidationError);
  CHECK_THROWS_AS(detect_rank(vec({1.0, 2.0}), ThresholdPolicy::largest_log_gap()), ValidationError);
  CHECK_THROWS_AS(detect_rank(vec({1.0}), ThresholdPolicy::fixed(0.0)), ValidationError);
}

TEST_CASE("auto policy falls back to relative under a two-decade gap") {
  const auto flat = detect_rank(vec({1.0, 0.9, 0.5, 0.2}), ThresholdPolicy::automatic());
  CHECK(flat.applied == ThresholdPolicy::Kind::relative);
  CHECK(flat.g_hat == 4);
  const auto sharp = detect_rank(vec({1.0, 0.9, 1e-9}), ThresholdPolicy::automatic());
  CHECK(sharp.applied == ThresholdPolicy::Kind::largest_log_gap);
  CHECK(sharp.g_hat == 2);
}

TEST_CASE("values below roundoff do not create spurious gaps") {
  // Under the floor the 1e-30 -> 1e-300 drop is invisible.
  const auto r = detect_rank(vec({1.0, 1.0, 1e-13, 1e-30, 1e-300}), ThresholdPolicy::largest_log_gap(), 5);
  CHECK(r.g_hat == 2);
}

TEST_CASE("toric ground space: rotated ensemble shows the gap at g") {
  const auto& r = toric_report();
  CHECK(r.g_hat() == 4);
  CHECK(r.g_exact() == 4);
  CHECK(r.singular_values[4] / r.singular_values[3] < 1e-4);
  for (Index j = 0; j < r.coefficients.cols(); ++j) CHECK(r.coefficients.col(j).norm() == doctest::Approx(1.0));
  CHECK((r.foot_points - r.target.basis.adjoint() * r.coefficients).norm() <= 1e-12);
  CHECK(r.branches.size() == 20);
  for (Index j = 1; j < r.singular_values.size(); ++j) CHECK(r.singular_values[j] <= r.singular_values[j - 1]);
}

TEST_CASE("identity rotations collapse the ensemble") {
  QrsiConfig cfg = toric_config();
  cfg.rotation.kind = RotationKind::identity;
  const auto r = run_qrsi(toric(), cfg);
  CHECK(r.g_hat() != 4);
  CHECK(r.singular_values[1] / r.singular_values[0] < 1e-10);
}

TEST_CASE("a single branch has rank one") {
  for (Filter f : std::vector<Filter>{ImaginaryTime{2.0, std::nullopt}, PowerFilter{3, std::nullopt},
                                      ChebyshevFilter{4, std::nullopt}, ShiftInvert{-8.0, 2}}) {
    QrsiConfig cfg = toric_config(f);
    cfg.branches = 1;
    CHECK(run_qrsi(toric(), cfg).g_hat() == 1);
  }
}

TEST_CASE("relative and largest-gap policies agree on the toric run") {
  const auto& sv = toric_report().singular_values;
  CHECK(detect_rank(sv, ThresholdPolicy::relative(1e-6), 256).g_hat == 4);
  CHECK(detect_rank(sv, ThresholdPolicy::largest_log_gap(), 256).g_hat == 4);
}

TEST_CASE("all-orthogonal ensembles raise an error naming the seed policy") {
  // A mild filter: shift-and-invert would lift the roundoff-level overlap of
  // the computed eigenvectors to order one.
  QrsiConfig cfg = toric_config(ImaginaryTime{1.0, std::nullopt});
  cfg.rotation.kind = RotationKind::identity;
  // Basis state 1 has no weight on the toric ground space.
  cfg.primitive.seed.index = 1;
  REQUIRE(select_eigenspace(toric(), -8.0, 1e-8).basis.row(1).norm() < 1e-12);
  try {
    run_qrsi(toric(), cfg);
    FAIL("expected DegenerateEnsemble");
  } catch (const DegenerateEnsemble& e) {
    CHECK(std::string(e.what()).find("basis_state(1)") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  QrsiConfig cfg = toric_config();
  cfg.branches = 0;
  CHECK_THROWS_AS(run_qrsi(toric(), cfg), ValidationError);
  cfg = toric_config();
  cfg.threshold = ThresholdPolicy::relative(-1.0);
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = toric_config();
  cfg.rotation.physical_dim = 128;
  CHECK_THROWS_AS(run_qrsi(toric(), cfg), ValidationError);
  cfg = toric_config();
  cfg.gram.kind = GramMode::Kind::shot_noise;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("picture equivalence at the report level") {
  // The shift sits off the spectrum: at a guarded shift the solve resolves the
  // roundoff splitting of the rotated ground level.
  for (Filter f : std::vector<Filter>{ImaginaryTime{2.0, std::nullopt}, ShiftInvert{-8.7, 4}}) {
    QrsiConfig cfg = toric_config(f);
    cfg.branches = 4;
    const auto state = run_qrsi(toric(), cfg);
    cfg.picture = Picture::hamiltonian;
    const auto ham = run_qrsi(toric(), cfg);
    for (Index j = 0; j < 4; ++j) CHECK((state.coefficients.col(j) - ham.coefficients.col(j)).norm() <= 1e-10);
    for (const auto& b : ham.branches) CHECK(b.spectral_deviation <= 1e-9 * toric().spectral_norm());
  }
}

TEST_CASE("results do not depend on thread count") {
  QrsiConfig cfg = toric_config();
  cfg.threads = 1;
  const auto one = run_qrsi(toric(), cfg);
  cfg.threads = 4;
  const auto four = run_qrsi(toric(), cfg);
  CHECK((one.coefficients - four.coefficients).norm() == 0.0);
  CHECK((one.singular_values - four.singular_values).norm() == 0.0);
  CHECK(one.g_hat() == four.g_hat());
}

TEST_CASE("exact gram matrix") {
  ComplexMatrix q = ComplexMatrix::Identity(6, 3);
  CHECK((gram_matrix(q, GramMode{GramMode::Kind::exact, 0, 0}) - ComplexMatrix::Identity(3, 3)).norm() == 0.0);
  const auto& r = toric_report();
  const GramMode exact{GramMode::Kind::exact, 0, 0};
  const ComplexMatrix g = gram_matrix(r.coefficients, exact);
  CHECK((g - r.coefficients.adjoint() * r.coefficients).norm() < 1e-12);
  CHECK(gram_rank(g, exact, ThresholdPolicy::largest_log_gap()).g_hat == r.g_hat());
  CHECK_THROWS_AS(gram_matrix(q, GramMode{GramMode::Kind::shot_noise, 0, 0}), ValidationError);
}

TEST_CASE("shot-noise gram estimates recover the degeneracy") {
  const auto& r = toric_report();
  int hits = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    const GramMode noisy{GramMode::Kind::shot_noise, 1000000, rep};
    const ComplexMatrix g = gram_matrix(r.coefficients, noisy);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    hits += gram_rank(g, noisy, ThresholdPolicy::largest_log_gap()).g_hat == 4 ? 1 : 0;
  }
  CHECK(hits >= 95);
}

TEST_CASE("svd gap bounds") {
  const auto check = verify_svd_gap_bounds(toric_report());
  CHECK(check.upper_holds);
  CHECK(check.lower_holds);
  CHECK(check.g == 4);

  // States inside the target space: sigma_{g+1} vanishes.
  QrsiConfig cfg = toric_config();
  RealVector values(4);
  values << 0.0, 0.0, 1.0, 2.0;
  const auto h = HermitianOperator::from_spectrum(ComplexMatrix::Identity(4, 4), values);
  cfg.rotation.physical_dim = 4;
  cfg.target_energy = 0.0;
  cfg.primitive.filter = ShiftInvert{0.0, 40};
  cfg.branches = 6;
  const auto r = run_qrsi(h, cfg);
  CHECK(r.singular_values[2] <= 1e-10);
  CHECK(verify_svd_gap_bounds(r).upper_holds);
}

TEST_CASE("gap ratio grows like inverse square root of leakage") {
  std::vector<double> x;
  std::vector<double> y;
  for (double beta : {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}) {
    const auto r = run_qrsi(toric(), toric_config(ImaginaryTime{beta, std::nullopt}));
    x.push_back(std::log(r.max_leakage));
    y.push_back(std::log(r.gap_ratio));
    const auto check = verify_svd_gap_bounds(r);
    CHECK(check.upper_holds);
    CHECK(check.lower_holds);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / x.size();
    my += y[i] / y.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  CHECK(slope <= -0.25);
  CHECK(slope >= -1.0);
}

TEST_CASE("sweep over a diagonal test matrix") {
  RealVector values(5);
  values << 0.0, 0.0, 1.0, 1.0, 1.0;
  const auto h = HermitianOperator::from_spectrum(ComplexMatrix::Identity(5, 5), values);
  const auto padded = pad_to_qubits(h, 100.0);
  QrsiConfig cfg;
  cfg.branches = 6;
  cfg.rotation.physical_dim = 5;
  cfg.rotation.padded_dim = 8;
  cfg.rotation.master_seed = 3;
  cfg.primitive.filter = ShiftInvert{0.0, 4};
  cfg.threshold = ThresholdPolicy::largest_log_gap();
  const auto levels = spectral_sweep(padded.op, cfg);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0].g_exact == 2);
  CHECK(levels[0].g_hat == 2);
  CHECK(levels[1].g_exact == 3);
  CHECK(levels[1].g_hat == 3);
  CHECK_FALSE(levels[0].ambiguous);

  const auto explicit_levels = spectral_sweep(padded.op, cfg, std::vector<double>{1.0});
  REQUIRE(explicit_levels.size() == 1);
  CHECK(explicit_levels[0].g_hat == 3);

  cfg.primitive.filter = PowerFilter{2, std::nullopt};
  CHECK_THROWS_AS(spectral_sweep(padded.op, cfg), ValidationError);
}

TEST_CASE("sweep flags clusters closer than twice the tolerance") {
  RealVector values(4);
  values << 0.0, 0.15, 1.0, 2.0;
  const auto h = HermitianOperator::from_spectrum(ComplexMatrix::Identity(4, 4), values);
  QrsiConfig cfg;
  cfg.branches = 3;
  cfg.rotation.physical_dim = 4;
  cfg.primitive.filter = ShiftInvert{0.0, 4};
  cfg.cluster_tol = 0.1;
  cfg.threshold = ThresholdPolicy::largest_log_gap();
  const auto levels = spectral_sweep(h, cfg);
  REQUIRE(levels.size() == 4);
  CHECK(levels[0].ambiguous);
  CHECK(levels[1].ambiguous);
  CHECK_FALSE(levels[3].ambiguous);
}

TEST_CASE("planted ground spaces, rotated and not") {
  for (Index g : {Index{6}, Index{11}}) {
    PlantedSpec spec;
    spec.degeneracy = g;
    spec.seed = 8;
    const auto h = build_planted(spec);
    QrsiConfig cfg = toric_config(ImaginaryTime{8.0, std::nullopt});
    cfg.target_energy = 0.0;
    const auto r = run_qrsi(h, cfg);
    CHECK(r.g_hat() == g);
    CHECK(r.singular_values[g] / r.singular_values[g - 1] <= 1e-3);
    cfg.rotation.kind = RotationKind::identity;
    const auto flat = run_qrsi(h, cfg);
    CHECK(flat.singular_values[1] / flat.singular_values[0] <= 1e-3);
  }
}

TEST_CASE("padded planted instance") {
  PlantedSpec spec;
  spec.dim = 200;
  spec.degeneracy = 3;
  spec.seed = 4;
  const auto h = build_planted(spec);
  const auto padded = pad_to_qubits(h, 10.0 * h.frobenius_norm());
  QrsiConfig cfg = toric_config(ImaginaryTime{8.0, std::nullopt});
  cfg.rotation.physical_dim = 200;
  cfg.rotation.padded_dim = 256;
  cfg.target_energy = 0.0;
  const auto r = run_qrsi(padded.op, cfg);
  CHECK(r.g_hat() == 3);
  CHECK(r.coefficients.bottomRows(56).norm() <= 1e-12);
}

TEST_CASE("perturbed toric code keeps the four-fold cluster") {
  ToricSpec spec;
  spec.perturbation_scale = 1e-3;
  spec.perturbation_seed = 9;
  const auto h = build_toric(spec);
  // Imaginary time at beta = 8 barely resolves a splitting of order 1e-3.
  QrsiConfig cfg = toric_config(ImaginaryTime{8.0, std::nullopt});
  cfg.cluster_tol = 0.5;
  cfg.target_energy = h.eigen().values[0];
  const auto r = run_qrsi(h, cfg);
  CHECK(r.g_exact() == 4);
  CHECK(r.g_hat() == 4);
}

TEST_CASE("name round trips") {
  CHECK(parse_picture(to_string(Picture::hamiltonian)) == Picture::hamiltonian);
  CHECK(parse_threshold_kind("auto") == ThresholdPolicy::Kind::automatic);
  CHECK(parse_gram_kind("shot_noise") == GramMode::Kind::shot_noise);
  CHECK_THROWS_AS(parse_picture("heisenberg"), ValidationError);
}
