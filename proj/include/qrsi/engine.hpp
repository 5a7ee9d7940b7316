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

#include "qrsi/linalg.hpp"
#include "qrsi/primitives.hpp"
#include "qrsi/rotations.hpp"

namespace qrsi {

enum class Picture { hamiltonian, state };

std::string to_string(Picture picture);
Picture parse_picture(const std::string& name);

struct ThresholdPolicy {
  enum class Kind { fixed, relative, largest_log_gap, automatic };
  Kind kind = Kind::automatic;
  double value = 0.0;  // tau for fixed, tau_rel for relative; unused otherwise

  static ThresholdPolicy fixed(double tau) { return {Kind::fixed, tau}; }
  static ThresholdPolicy relative(double tau_rel) { return {Kind::relative, tau_rel}; }
  static ThresholdPolicy largest_log_gap() { return {Kind::largest_log_gap, 0.0}; }
  /// largest_log_gap, falling back to relative(1e-6) when the widest gap
  /// spans less than two decades.
  static ThresholdPolicy automatic() { return {Kind::automatic, 0.0}; }

  void validate() const;
};

std::string to_string(ThresholdPolicy::Kind kind);
ThresholdPolicy::Kind parse_threshold_kind(const std::string& name);

struct RankDetection {
  Index g_hat = 0;
  double tau_applied = 0.0;
  /// Nothing cleared the threshold (g_hat = 0).
  bool below_threshold = false;
  /// Policy that actually fixed tau; differs from the request only for
  /// `automatic`.
  ThresholdPolicy::Kind applied = ThresholdPolicy::Kind::fixed;
};

/// `values` must be descending and non-empty. Before taking logarithms the
/// values are floored at sigma_1 * extent * machine epsilon, `extent` being
/// max(rows, cols) of the matrix they came from (defaults to values.size()).
RankDetection detect_rank(const RealVector& values, const ThresholdPolicy& policy, Index extent = 0);

struct GramMode {
  enum class Kind { off, exact, shot_noise };
  Kind kind = Kind::off;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

std::string to_string(GramMode::Kind kind);
GramMode::Kind parse_gram_kind(const std::string& name);

struct QrsiConfig {
  Index branches = 20;
  Picture picture = Picture::state;
  RotationSpec rotation;
  PrimitiveSpec primitive;
  ThresholdPolicy threshold = ThresholdPolicy::automatic();
  double target_energy = 0.0;
  std::optional<double> cluster_tol;
  GramMode gram;
  /// Worker cap; 0 uses the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;

  void validate() const;
};

struct EnsembleReport {
  // Operational: computed from C alone.
  ComplexMatrix coefficients;  // N x M, unit columns
  RealVector singular_values;  // descending
  RankDetection rank;
  std::optional<ComplexMatrix> gram;
  std::optional<RankDetection> gram_rank;

  // Diagnostic: uses the eigendecomposition oracle.
  EigenspaceHandle target;
  ComplexMatrix foot_points;     // F = V_g^dagger C, g x M
  RealVector foot_point_values;  // sigma(F), descending
  /// sigma_g(C) / sigma_{g+1}(C) with the exact g; infinity when
  /// sigma_{g+1} vanishes or g >= min(N, M).
  double gap_ratio = 0.0;
  double max_leakage = 0.0;
  std::vector<BranchResult> branches;

  std::vector<std::string> warnings;

  Index g_hat() const { return rank.g_hat; }
  Index g_exact() const { return target.degeneracy(); }
};

/// Runs one branch: samples R_i, prepares in the configured picture and
/// returns the corrected state with its oracle diagnostics.
BranchResult run_branch(const HermitianOperator& h, const QrsiConfig& cfg, const EigenspaceHandle& target,
                        std::uint64_t branch_index);

/// Throws DegenerateEnsemble when every branch has zero target overlap.
EnsembleReport run_qrsi(const HermitianOperator& h, const QrsiConfig& cfg);

/// Exact: C^dagger C. Shot noise: adds Hermitian Gaussian noise of
/// per-entry standard deviation 1/sqrt(shots) and clips negative
/// eigenvalues. ValidationError on shots = 0 or mode off.
ComplexMatrix gram_matrix(const ComplexMatrix& coefficients, const GramMode& mode);

/// Rank from sqrt(lambda(G)). Exact Gram matrices use `policy`; noisy ones
/// use the fixed noise floor tau = sqrt(4 sqrt(M / shots)), twice the
/// typical spectral norm of the noise.
RankDetection gram_rank(const ComplexMatrix& gram, const GramMode& mode, const ThresholdPolicy& policy);

struct SvdGapCheck {
  Index g = 0;
  Index branches = 0;
  double epsilon_q = 0.0;
  double sigma_g_c = 0.0;
  double sigma_g1_c = 0.0;
  double sigma_g_f = 0.0;
  double bound = 0.0;  // sqrt(M epsilon_q)
  /// Roundoff allowance added to both sides: 64 eps_mach sigma_1(C).
  double allowance = 0.0;
  double upper_slack = 0.0;  // bound + allowance - sigma_{g+1}(C)
  double lower_slack = 0.0;  // sigma_g(C) - (sigma_g(F) - bound) + allowance
  bool upper_holds = false;
  bool lower_holds = false;
};

SvdGapCheck verify_svd_gap_bounds(const EnsembleReport& report);

struct SweepLevel {
  Index level_index = 0;
  double sigma = 0.0;
  Index g_exact = 0;
  Index g_hat = 0;
  RealVector singular_values;
  bool ambiguous = false;
};

/// Shift-and-invert at every level. Without `sigmas` the oracle spectrum is
/// clustered and sigma placed on each cluster mean; exact g is the size of
/// the cluster nearest sigma; levels confined to the padding block are
/// skipped. Levels whose cluster lies within
/// 2 cluster_tol of another are flagged ambiguous.
std::vector<SweepLevel> spectral_sweep(const HermitianOperator& h, const QrsiConfig& cfg,
                                       const std::optional<std::vector<double>>& sigmas = std::nullopt);

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). The first exception by index is rethrown after all
/// workers finish.
void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& body);

}  // namespace qrsi
