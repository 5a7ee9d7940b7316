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
#include <vector>

#include "qrsi/engine.hpp"

namespace qrsi {

/// arcsin |<n, w>| for unit w and unit hyperplane normal n, in [0, pi/2].
double fs_distance(const ComplexVector& w, const ComplexVector& normal);

struct FootPointSample {
  EigenspaceHandle target;
  ComplexMatrix directions;  // g x T, zero columns for orthogonal branches
  std::vector<double> alphas;
  Index orthogonal = 0;
};

/// Foot-points of branches 0..samples-1 under `cfg`.
FootPointSample collect_foot_points(const HermitianOperator& h, const QrsiConfig& cfg, Index samples);

struct AntiConcentrationEstimate {
  double delta = 0.0;
  double eta_hat = 0.0;
  Index hyperplanes = 0;
  Index samples = 0;
  double ci_half_width = 0.0;  // Wilson, z = 1.96, at the minimizing hyperplane
  Index worst_hyperplane = 0;
  std::string protocol = "minimum over sampled hyperplanes";
};

/// Wilson score interval half-width for p_hat over n trials.
double wilson_half_width(double p_hat, Index n, double z = 1.96);

/// Hyperplane normals are uniform on the unit sphere of C^g, drawn from
/// the stream (seed, hyperplanes, k).
AntiConcentrationEstimate estimate_eta_from(const ComplexMatrix& directions, double delta, Index hyperplanes,
                                            std::uint64_t seed);

/// ValidationError when the target is non-degenerate (g = 1).
AntiConcentrationEstimate estimate_eta(const HermitianOperator& h, const QrsiConfig& cfg, double delta,
                                       Index hyperplanes, Index samples);

/// g * ceil(eta^-g ln(1/epsilon)).
Index amplified_branch_count(double eta, Index g, double epsilon);

struct SpanningReport {
  Index g = 0;
  Index batch = 0;
  Index trials = 0;
  Index successes = 0;
  double success_fraction = 0.0;
  std::optional<double> eta;
  std::optional<double> bound_eta_pow_g;
  std::optional<double> epsilon;
  std::optional<Index> amplified_m;
};

/// Trial t uses branches t*batch .. t*batch+batch-1. Success is
/// rank(F_batch) = g under relative(1e-6) on sigma(F_batch).
SpanningReport spanning_trials(const HermitianOperator& h, const QrsiConfig& cfg, Index batch, Index trials,
                               std::optional<double> eta = std::nullopt,
                               std::optional<double> epsilon = std::nullopt);

struct SerialReport {
  Index samples = 0;
  double overlap_before = 0.0;
  double mean_overlap = 0.0;
  double standard_error = 0.0;
  double baseline = 0.0;  // g / N
};

/// Prepares once on the unrotated operator, then rotates the output by
/// fresh draws of cfg.rotation (stream domain serial_rotation) and records
/// the surviving target weight.
SerialReport serial_baseline(const HermitianOperator& h, const QrsiConfig& cfg, Index samples);

struct KsResult {
  Index direction_index = 0;
  double statistic = 0.0;
  double p_value = 0.0;
};

/// Kolmogorov distribution tail P(K > lambda).
double kolmogorov_tail(double lambda);

/// One-sample KS of `sample` against `cdf`, with Stephens' finite-n
/// correction for the p-value.
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Two-sample KS with effective size n1 n2 / (n1 + n2).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct FootPointTest {
  Index g = 0;
  Index samples = 0;
  std::vector<KsResult> ks;
  double significance = 0.01;  // before Bonferroni
  double threshold = 0.0;      // significance / directions
  bool passed = false;
  bool underpowered = false;  // fewer than 100 samples
};

/// KS test of |<n, w>|^2 against Beta(1, g-1), CDF 1 - (1 - t)^(g-1), for
/// n = e_1 and directions - 1 further random unit directions.
FootPointTest footpoint_distribution_test(const HermitianOperator& h, const QrsiConfig& cfg, Index samples,
                                          Index directions = 5);

}  // namespace qrsi
