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

#include "qrsi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qrsi/error.hpp"
#include "qrsi/random.hpp"

namespace qrsi {

namespace {

EigenspaceHandle resolve_target(const HermitianOperator& h, const QrsiConfig& cfg) {
  return select_eigenspace(h, cfg.target_energy, cfg.cluster_tol ? *cfg.cluster_tol : default_cluster_tol(h));
}

double ks_statistic(std::vector<double>& sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double stephens_p(double d, double n) {
  const double root = std::sqrt(n);
  return kolmogorov_tail((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

double fs_distance(const ComplexVector& w, const ComplexVector& normal) {
  if (w.size() != normal.size()) throw ValidationError("fs_distance: length mismatch");
  return std::asin(std::clamp(std::abs(normal.dot(w)), 0.0, 1.0));
}

FootPointSample collect_foot_points(const HermitianOperator& h, const QrsiConfig& cfg, Index samples) {
  cfg.validate();
  if (samples < 1) throw ValidationError("need at least one foot-point sample");
  FootPointSample out;
  out.target = resolve_target(h, cfg);
  std::vector<BranchResult> branches(static_cast<std::size_t>(samples));
  parallel_for(samples, cfg.threads, [&](Index i) {
    BranchResult b = run_branch(h, cfg, out.target, static_cast<std::uint64_t>(i));
    b.coefficients.resize(0);  // only the foot-point is kept
    branches[static_cast<std::size_t>(i)] = std::move(b);
  });
  out.directions.resize(out.target.degeneracy(), samples);
  for (Index i = 0; i < samples; ++i) {
    const auto& b = branches[static_cast<std::size_t>(i)];
    out.directions.col(i) = b.foot_point;
    out.alphas.push_back(b.alpha);
    out.orthogonal += b.orthogonal ? 1 : 0;
  }
  return out;
}

double wilson_half_width(double p_hat, Index n, double z) {
  if (n < 1) throw ValidationError("Wilson interval needs n >= 1");
  const double nn = static_cast<double>(n);
  const double z2 = z * z;
  return z / (1.0 + z2 / nn) * std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn));
}

AntiConcentrationEstimate estimate_eta_from(const ComplexMatrix& directions, double delta, Index hyperplanes,
                                            std::uint64_t seed) {
  const Index g = directions.rows();
  if (g < 2) throw ValidationError("anti-concentration is not applicable to a non-degenerate level (g = 1)");
  if (!(delta >= 0.0) || hyperplanes < 1 || directions.cols() < 1) {
    throw ValidationError("estimate_eta needs delta >= 0, K >= 1 and T >= 1");
  }
  AntiConcentrationEstimate out;
  out.delta = delta;
  out.hyperplanes = hyperplanes;
  out.samples = directions.cols();
  out.eta_hat = 2.0;
  // sin(delta) threshold on |<n, w>| avoids an asin per sample.
  const double cut = std::sin(std::min(delta, std::numbers::pi / 2));
  for (Index k = 0; k < hyperplanes; ++k) {
    Rng rng = make_stream(seed, StreamDomain::hyperplanes, static_cast<std::uint64_t>(k));
    const ComplexVector normal = random_unit_vector(rng, g);
    const RealVector overlaps = (directions.adjoint() * normal).cwiseAbs();
    Index hits = 0;
    for (Index t = 0; t < overlaps.size(); ++t) {
      // zero columns (orthogonal branches) never count
      hits += (directions.col(t).squaredNorm() > 0.0 && overlaps[t] >= cut) ? 1 : 0;
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(out.samples);
    if (frac < out.eta_hat) {
      out.eta_hat = frac;
      out.worst_hyperplane = k;
    }
  }
  out.ci_half_width = wilson_half_width(out.eta_hat, out.samples);
  return out;
}

AntiConcentrationEstimate estimate_eta(const HermitianOperator& h, const QrsiConfig& cfg, double delta,
                                       Index hyperplanes, Index samples) {
  if (resolve_target(h, cfg).degeneracy() < 2) {
    throw ValidationError("anti-concentration is not applicable to a non-degenerate level (g = 1)");
  }
  const FootPointSample fp = collect_foot_points(h, cfg, samples);
  return estimate_eta_from(fp.directions, delta, hyperplanes, cfg.rotation.master_seed);
}

Index amplified_branch_count(double eta, Index g, double epsilon) {
  if (!(eta > 0.0 && eta <= 1.0) || g < 1 || !(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("amplified branch count needs 0 < eta <= 1, g >= 1, 0 < epsilon < 1");
  }
  const double rounds = std::ceil(std::pow(eta, -static_cast<double>(g)) * std::log(1.0 / epsilon));
  return g * static_cast<Index>(rounds);
}

SpanningReport spanning_trials(const HermitianOperator& h, const QrsiConfig& cfg, Index batch, Index trials,
                               std::optional<double> eta, std::optional<double> epsilon) {
  cfg.validate();
  if (batch < 1 || trials < 1) throw ValidationError("spanning trials need batch >= 1 and trials >= 1");
  const EigenspaceHandle target = resolve_target(h, cfg);
  SpanningReport out;
  out.g = target.degeneracy();
  out.batch = batch;
  out.trials = trials;

  std::vector<char> success(static_cast<std::size_t>(trials), 0);
  parallel_for(trials, cfg.threads, [&](Index t) {
    ComplexMatrix f(out.g, batch);
    for (Index j = 0; j < batch; ++j) {
      const auto index = static_cast<std::uint64_t>(t * batch + j);
      const BranchResult b = run_branch(h, cfg, target, index);
      f.col(j) = target.basis.adjoint() * b.coefficients;
    }
    const RankDetection rank = detect_rank(singular_values(f), ThresholdPolicy::relative(1e-6));
    success[static_cast<std::size_t>(t)] = rank.g_hat == out.g ? 1 : 0;
  });
  for (char s : success) out.successes += s;
  out.success_fraction = static_cast<double>(out.successes) / static_cast<double>(trials);
  out.eta = eta;
  out.epsilon = epsilon;
  if (eta) out.bound_eta_pow_g = std::pow(*eta, static_cast<double>(out.g));
  if (eta && epsilon) out.amplified_m = amplified_branch_count(*eta, out.g, *epsilon);
  return out;
}

SerialReport serial_baseline(const HermitianOperator& h, const QrsiConfig& cfg, Index samples) {
  cfg.validate();
  if (samples < 2) throw ValidationError("serial baseline needs at least two samples");
  const EigenspaceHandle target = resolve_target(h, cfg);
  PrimitiveSpec primitive = cfg.primitive;
  if (!primitive.cluster_tol) primitive.cluster_tol = cfg.cluster_tol;
  const ComplexVector seed = make_seed(primitive.seed, cfg.rotation.physical_dim, h.dim());
  const ComplexVector prepared = prepare(h, seed, primitive);

  SerialReport out;
  out.samples = samples;
  out.overlap_before = 1.0 - leakage(prepared, target);
  out.baseline = static_cast<double>(target.degeneracy()) / static_cast<double>(cfg.rotation.physical_dim);

  RotationSpec serial = cfg.rotation;
  serial.master_seed = stream_seed(cfg.rotation.master_seed, StreamDomain::serial_rotation, 0);
  std::vector<double> overlaps(static_cast<std::size_t>(samples));
  parallel_for(samples, cfg.threads, [&](Index s) {
    const ComplexVector rotated = sample_rotation(serial, static_cast<std::uint64_t>(s)).apply(prepared);
    overlaps[static_cast<std::size_t>(s)] = 1.0 - leakage(rotated, target);
  });
  double sum = 0.0;
  for (double o : overlaps) sum += o;
  out.mean_overlap = sum / static_cast<double>(samples);
  double ss = 0.0;
  for (double o : overlaps) ss += (o - out.mean_overlap) * (o - out.mean_overlap);
  out.standard_error = std::sqrt(ss / static_cast<double>(samples - 1) / static_cast<double>(samples));
  return out;
}

double kolmogorov_tail(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // P(K <= lambda) via the theta-function form, accurate for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      cdf += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double tail = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    tail += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(tail, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw ValidationError("KS test needs a non-empty sample");
  KsResult out;
  out.statistic = ks_statistic(sample, cdf);
  out.p_value = stephens_p(out.statistic, static_cast<double>(sample.size()));
  return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ValidationError("KS test needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult out;
  out.statistic = d;
  out.p_value = stephens_p(d, na * nb / (na + nb));
  return out;
}

FootPointTest footpoint_distribution_test(const HermitianOperator& h, const QrsiConfig& cfg, Index samples,
                                          Index directions) {
  if (directions < 1) throw ValidationError("need at least one test direction");
  const FootPointSample fp = collect_foot_points(h, cfg, samples);
  FootPointTest out;
  out.g = fp.target.degeneracy();
  if (out.g < 2) throw ValidationError("foot-point law test needs a degenerate level (g >= 2)");
  out.samples = samples;
  out.underpowered = samples < 100;
  out.threshold = out.significance / static_cast<double>(directions);

  const double power = static_cast<double>(out.g - 1);
  auto beta_cdf = [power](double t) { return 1.0 - std::pow(1.0 - std::clamp(t, 0.0, 1.0), power); };
  out.passed = true;
  for (Index k = 0; k < directions; ++k) {
    ComplexVector n = ComplexVector::Zero(out.g);
    if (k == 0) {
      n[0] = 1.0;
    } else {
      Rng rng = make_stream(cfg.rotation.master_seed, StreamDomain::test_directions, static_cast<std::uint64_t>(k));
      n = random_unit_vector(rng, out.g);
    }
    const RealVector overlaps = (fp.directions.adjoint() * n).cwiseAbs2();
    std::vector<double> sample(overlaps.data(), overlaps.data() + overlaps.size());
    KsResult r = ks_one_sample(std::move(sample), beta_cdf);
    r.direction_index = k;
    out.passed = out.passed && r.p_value > out.threshold;
    out.ks.push_back(r);
  }
  return out;
}

}  // namespace qrsi
