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

#include "qrsi/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "qrsi/error.hpp"
#include "qrsi/random.hpp"

namespace qrsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoDecades = 4.605170185988092;  // ln 100

std::string describe_seed(const SeedPolicy& seed) {
  if (seed.kind == SeedKind::basis_state) return "basis_state(" + std::to_string(seed.index) + ")";
  return to_string(seed.kind);
}

double resolved_cluster_tol(const HermitianOperator& h, const QrsiConfig& cfg) {
  return cfg.cluster_tol ? *cfg.cluster_tol : default_cluster_tol(h);
}

RealVector descending_sqrt_eigenvalues(const ComplexMatrix& gram) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("Gram eigendecomposition did not converge");
  const RealVector& ascending = solver.eigenvalues();
  RealVector out(ascending.size());
  for (Index j = 0; j < out.size(); ++j) out[j] = std::sqrt(std::max(0.0, ascending[out.size() - 1 - j]));
  return out;
}

}  // namespace

std::string to_string(Picture picture) {
  return picture == Picture::hamiltonian ? "hamiltonian" : "state";
}

Picture parse_picture(const std::string& name) {
  if (name == "hamiltonian") return Picture::hamiltonian;
  if (name == "state") return Picture::state;
  throw ValidationError("unknown picture '" + name + "' (expected hamiltonian or state)");
}

std::string to_string(ThresholdPolicy::Kind kind) {
  switch (kind) {
    case ThresholdPolicy::Kind::fixed: return "fixed";
    case ThresholdPolicy::Kind::relative: return "relative";
    case ThresholdPolicy::Kind::largest_log_gap: return "largest_log_gap";
    case ThresholdPolicy::Kind::automatic: return "auto";
  }
  return "unknown";
}

ThresholdPolicy::Kind parse_threshold_kind(const std::string& name) {
  using K = ThresholdPolicy::Kind;
  for (auto kind : {K::fixed, K::relative, K::largest_log_gap, K::automatic}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("unknown threshold policy '" + name + "'");
}

void ThresholdPolicy::validate() const {
  if ((kind == Kind::fixed || kind == Kind::relative) && !(value > 0.0 && std::isfinite(value))) {
    throw ValidationError("threshold " + to_string(kind) + " needs a positive finite value");
  }
}

std::string to_string(GramMode::Kind kind) {
  switch (kind) {
    case GramMode::Kind::off: return "off";
    case GramMode::Kind::exact: return "exact";
    case GramMode::Kind::shot_noise: return "shot_noise";
  }
  return "unknown";
}

GramMode::Kind parse_gram_kind(const std::string& name) {
  for (auto kind : {GramMode::Kind::off, GramMode::Kind::exact, GramMode::Kind::shot_noise}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("unknown gram mode '" + name + "'");
}

void GramMode::validate() const {
  if (kind == Kind::shot_noise && shots == 0) throw ValidationError("shot-noise Gram estimation needs shots > 0");
}

void QrsiConfig::validate() const {
  if (branches < 1) throw ValidationError("need at least one branch (M >= 1)");
  rotation.validate();
  primitive.validate();
  threshold.validate();
  gram.validate();
  if (cluster_tol && !(*cluster_tol >= 0.0)) throw ValidationError("cluster_tol must be >= 0");
}

RankDetection detect_rank(const RealVector& values, const ThresholdPolicy& policy, Index extent) {
  using K = ThresholdPolicy::Kind;
  policy.validate();
  if (values.size() == 0) throw ValidationError("detect_rank needs at least one singular value");
  for (Index j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j]) || values[j] < 0.0) throw ValidationError("singular values must be finite and >= 0");
    if (j > 0 && values[j] > values[j - 1]) throw ValidationError("singular values must be descending");
  }
  RankDetection out;
  out.applied = policy.kind;
  const double top = values[0];

  auto count_above = [&](double tau) {
    out.tau_applied = tau;
    out.g_hat = 0;
    for (Index j = 0; j < values.size(); ++j) out.g_hat += values[j] > tau ? 1 : 0;
    out.below_threshold = out.g_hat == 0;
    return out;
  };

  if (policy.kind == K::fixed) return count_above(policy.value);
  if (policy.kind == K::relative) return count_above(policy.value * top);
  if (!(top > 0.0)) {
    out.below_threshold = true;
    return out;
  }
  if (values.size() == 1) {
    out.g_hat = 1;
    out.tau_applied = 0.0;
    return out;
  }

  const double scale = static_cast<double>(extent > 0 ? extent : values.size());
  const double floor = top * scale * std::numeric_limits<double>::epsilon();
  Index split = 0;
  double widest = -1.0;
  for (Index j = 0; j + 1 < values.size(); ++j) {
    const double gap = std::log(std::max(values[j], floor)) - std::log(std::max(values[j + 1], floor));
    if (gap > widest) {
      widest = gap;
      split = j;
    }
  }
  if (policy.kind == K::automatic && widest < kTwoDecades) {
    count_above(1e-6 * top);
    out.applied = K::relative;
    return out;
  }
  out.applied = K::largest_log_gap;
  if (widest <= 0.0) {
    // Flat spectrum: nothing to split.
    out.g_hat = values.size();
    out.tau_applied = floor;
    return out;
  }
  out.g_hat = split + 1;
  out.tau_applied = std::sqrt(std::max(values[split], floor) * std::max(values[split + 1], floor));
  return out;
}

void parallel_for(Index count, unsigned threads, const std::function<void(Index)>& body) {
  if (count <= 0) return;
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<Index>(workers, count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<Index> next{0};
  auto work = [&] {
    for (Index i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

BranchResult run_branch(const HermitianOperator& h, const QrsiConfig& cfg, const EigenspaceHandle& target,
                        std::uint64_t branch_index) {
  const BlockRotation rotation = sample_rotation(cfg.rotation, branch_index);
  PrimitiveSpec primitive = cfg.primitive;
  if (!primitive.cluster_tol) primitive.cluster_tol = cfg.cluster_tol;
  const ComplexVector seed = make_seed(primitive.seed, cfg.rotation.physical_dim, h.dim());

  BranchResult out;
  out.branch_index = branch_index;
  out.rotation_seed = stream_seed(cfg.rotation.master_seed, StreamDomain::rotation, branch_index);
  if (cfg.picture == Picture::hamiltonian) {
    const HermitianOperator rotated = rotation.conjugate(h);
    out.coefficients = rotation.apply(prepare(rotated, seed, primitive));
    out.spectral_deviation = (rotated.eigen().values - h.eigen().values).cwiseAbs().maxCoeff();
  } else {
    out.coefficients = prepare(h, rotation.apply(seed), primitive);
    out.spectral_deviation = std::numeric_limits<double>::quiet_NaN();
  }
  out.epsilon = leakage(out.coefficients, target);
  FootPoint fp = foot_point(out.coefficients, target);
  out.foot_point = std::move(fp.direction);
  out.alpha = fp.alpha;
  out.orthogonal = fp.orthogonal;
  return out;
}

EnsembleReport run_qrsi(const HermitianOperator& h, const QrsiConfig& cfg) {
  cfg.validate();
  if (h.dim() != cfg.rotation.resolved_padded_dim()) {
    throw ValidationError("operator dimension " + std::to_string(h.dim()) + " does not match rotation dimension " +
                          std::to_string(cfg.rotation.resolved_padded_dim()));
  }
  EnsembleReport report;
  report.target = select_eigenspace(h, cfg.target_energy, resolved_cluster_tol(h, cfg));

  const Index m = cfg.branches;
  report.branches.resize(static_cast<std::size_t>(m));
  parallel_for(m, cfg.threads, [&](Index i) {
    report.branches[static_cast<std::size_t>(i)] = run_branch(h, cfg, report.target, static_cast<std::uint64_t>(i));
  });

  Index orthogonal = 0;
  report.coefficients.resize(h.dim(), m);
  for (Index i = 0; i < m; ++i) {
    const auto& branch = report.branches[static_cast<std::size_t>(i)];
    report.coefficients.col(i) = branch.coefficients;
    report.max_leakage = std::max(report.max_leakage, branch.epsilon);
    orthogonal += branch.orthogonal ? 1 : 0;
  }
  if (orthogonal == m) {
    throw DegenerateEnsemble("every branch is orthogonal to the target eigenspace at E = " +
                             std::to_string(report.target.energy) + " (seed policy " +
                             describe_seed(cfg.primitive.seed) + ")");
  }
  if (orthogonal > 0) {
    report.warnings.push_back(std::to_string(orthogonal) + " of " + std::to_string(m) +
                              " branches have zero target overlap");
  }

  report.singular_values = singular_values(report.coefficients);
  report.rank = detect_rank(report.singular_values, cfg.threshold, std::max(h.dim(), m));
  if (report.rank.below_threshold) report.warnings.push_back("no singular value cleared the threshold");

  report.foot_points = report.target.basis.adjoint() * report.coefficients;
  report.foot_point_values = singular_values(report.foot_points);
  const Index g = report.target.degeneracy();
  const auto& sv = report.singular_values;
  report.gap_ratio = (g < sv.size() && sv[g] > 0.0) ? sv[g - 1] / sv[g] : kInf;

  if (cfg.gram.kind != GramMode::Kind::off) {
    report.gram = gram_matrix(report.coefficients, cfg.gram);
    report.gram_rank = gram_rank(*report.gram, cfg.gram, cfg.threshold);
  }
  return report;
}

ComplexMatrix gram_matrix(const ComplexMatrix& coefficients, const GramMode& mode) {
  mode.validate();
  if (mode.kind == GramMode::Kind::off) throw ValidationError("gram_matrix called with mode off");
  ComplexMatrix gram = coefficients.adjoint() * coefficients;
  gram = hermitian_part(gram);
  if (mode.kind == GramMode::Kind::exact) return gram;

  Rng rng = make_stream(mode.seed, StreamDomain::gram_noise, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = 1.0 / std::sqrt(static_cast<double>(mode.shots));
  const Index m = gram.rows();
  for (Index j = 0; j < m; ++j) {
    gram(j, j) += sd * normal(rng);
    for (Index i = j + 1; i < m; ++i) {
      const Complex z = sd * complex_normal(rng);
      gram(i, j) += z;
      gram(j, i) += std::conj(z);
    }
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram);
  if (solver.info() != Eigen::Success) throw NumericalError("Gram eigendecomposition did not converge");
  const RealVector clipped = solver.eigenvalues().cwiseMax(0.0);
  return hermitian_part(solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().adjoint());
}

RankDetection gram_rank(const ComplexMatrix& gram, const GramMode& mode, const ThresholdPolicy& policy) {
  const RealVector values = descending_sqrt_eigenvalues(gram);
  if (mode.kind == GramMode::Kind::shot_noise) {
    const double m = static_cast<double>(gram.rows());
    const double tau = std::sqrt(4.0 * std::sqrt(m / static_cast<double>(mode.shots)));
    return detect_rank(values, ThresholdPolicy::fixed(tau));
  }
  return detect_rank(values, policy, gram.rows());
}

SvdGapCheck verify_svd_gap_bounds(const EnsembleReport& report) {
  SvdGapCheck out;
  const auto& sv = report.singular_values;
  const auto& fv = report.foot_point_values;
  out.g = report.target.degeneracy();
  out.branches = report.coefficients.cols();
  out.epsilon_q = report.max_leakage;
  out.sigma_g_c = out.g <= sv.size() ? sv[out.g - 1] : 0.0;
  out.sigma_g1_c = out.g < sv.size() ? sv[out.g] : 0.0;
  out.sigma_g_f = out.g <= fv.size() ? fv[out.g - 1] : 0.0;
  out.bound = std::sqrt(static_cast<double>(out.branches) * out.epsilon_q);
  out.allowance = 64.0 * std::numeric_limits<double>::epsilon() * (sv.size() > 0 ? sv[0] : 0.0);
  out.upper_slack = out.bound + out.allowance - out.sigma_g1_c;
  out.lower_slack = out.sigma_g_c - (out.sigma_g_f - out.bound) + out.allowance;
  out.upper_holds = out.upper_slack >= 0.0;
  out.lower_holds = out.lower_slack >= 0.0;
  return out;
}

std::vector<SweepLevel> spectral_sweep(const HermitianOperator& h, const QrsiConfig& cfg,
                                       const std::optional<std::vector<double>>& sigmas) {
  if (!std::holds_alternative<ShiftInvert>(cfg.primitive.filter)) {
    throw ValidationError("spectral sweep needs the shift_invert primitive");
  }
  const double tol = resolved_cluster_tol(h, cfg);
  const auto clusters = cluster_levels(h.eigen().values, tol);
  const RealVector& values = h.eigen().values;

  auto nearest_cluster = [&](double sigma) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < clusters.size(); ++c) {
      if (std::abs(clusters[c].center - sigma) < std::abs(clusters[best].center - sigma)) best = c;
    }
    return best;
  };
  auto ambiguous = [&](std::size_t c) {
    const auto& cl = clusters[c];
    const bool below = c > 0 && values[cl.begin] - values[cl.begin - 1] <= 2.0 * tol;
    const bool above = c + 1 < clusters.size() && values[cl.end] - values[cl.end - 1] <= 2.0 * tol;
    return below || above;
  };

  // Levels living entirely on the padding block are unreachable from the
  // physical seeds and are left out of the automatic sweep.
  auto physical = [&](const LevelCluster& cl) {
    const Index n = cfg.rotation.physical_dim;
    if (n >= values.size()) return true;
    const auto block = h.eigen().vectors.middleCols(cl.begin, cl.size()).topRows(n);
    return block.norm() > 1e-8;
  };

  std::vector<double> shifts;
  if (sigmas) {
    shifts = *sigmas;
  } else {
    for (const auto& cl : clusters) {
      if (physical(cl)) shifts.push_back(cl.center);
    }
  }

  std::vector<SweepLevel> out;
  out.reserve(shifts.size());
  for (std::size_t k = 0; k < shifts.size(); ++k) {
    const std::size_t c = nearest_cluster(shifts[k]);
    QrsiConfig level_cfg = cfg;
    auto& si = std::get<ShiftInvert>(level_cfg.primitive.filter);
    si.sigma = shifts[k];
    level_cfg.target_energy = clusters[c].center;
    level_cfg.cluster_tol = tol;
    const EnsembleReport report = run_qrsi(h, level_cfg);

    SweepLevel level;
    level.level_index = static_cast<Index>(k);
    level.sigma = shifts[k];
    level.g_exact = clusters[c].size();
    level.g_hat = report.g_hat();
    level.singular_values = report.singular_values;
    level.ambiguous = ambiguous(c);
    out.push_back(std::move(level));
  }
  return out;
}

}  // namespace qrsi
