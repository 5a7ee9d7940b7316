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

#include "qrsi/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrsi/error.hpp"

namespace qrsi {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kOrthogonalAlpha = 1e-14;

double cluster_tolerance(const HermitianOperator& h, const PrimitiveSpec& spec) {
  return spec.cluster_tol ? *spec.cluster_tol : default_cluster_tol(h);
}

/// Lowest eigenvalue outside the ground cluster, if any.
std::optional<double> first_excited(const HermitianOperator& h, double tol) {
  const auto& values = h.eigen().values;
  for (Index k = 1; k < values.size(); ++k) {
    if (values[k] - values[0] > tol) return values[k];
  }
  return std::nullopt;
}

ComplexVector normalized(const ComplexVector& v, const char* who) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw NumericalError(std::string(who) + " annihilated the seed (no support on the amplified levels)");
  }
  return v / norm;
}

// Applies sign(x) * exp(log_magnitude(x)) rescaled so that the largest
// factor on the seed's support is 1; the overall scale drops out on
// normalization and this keeps high powers finite.
template <class LogMagnitude, class Sign>
ComplexVector apply_log_filter(const HermitianOperator& h, const ComplexVector& seed,
                               LogMagnitude log_magnitude, Sign sign, const char* who) {
  const auto& eig = h.eigen();
  const ComplexVector coords = eig.vectors.adjoint() * seed;
  double reference = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < coords.size(); ++k) {
    if (std::abs(coords[k]) > 0.0) reference = std::max(reference, log_magnitude(eig.values[k]));
  }
  if (!std::isfinite(reference)) {
    throw NumericalError(std::string(who) + " annihilated the seed (filter vanishes on its support)");
  }
  auto f = [&](double x) {
    const double lm = log_magnitude(x);
    return lm == -std::numeric_limits<double>::infinity() ? 0.0 : sign(x) * std::exp(lm - reference);
  };
  return normalized(matrix_function_apply(h, f, seed), who);
}

ComplexVector run_imaginary_time(const HermitianOperator& h, const ComplexVector& seed,
                                 const ImaginaryTime& it, const PrimitiveSpec& spec) {
  if (!(it.beta >= 0.0)) throw ValidationError("imaginary time needs beta >= 0");
  const double reference = spec.oracle_free ? gershgorin_lower_bound(h.matrix()) : h.eigen().values[0];
  const double beta = it.beta;
  return apply_log_filter(
      h, seed, [&](double x) { return -beta * (x - reference); }, [](double) { return 1.0; },
      "imaginary-time filter");
}

ComplexVector run_power(const HermitianOperator& h, const ComplexVector& seed, const PowerFilter& pf,
                        const PrimitiveSpec& spec) {
  if (pf.q < 0) throw ValidationError("power filter needs q >= 0");
  if (pf.q == 0) return normalized(seed, "power filter");
  double mu = 0.0;
  if (pf.mu) {
    mu = *pf.mu;
  } else if (spec.oracle_free) {
    mu = gershgorin_upper_bound(h.matrix());
  } else {
    const auto& values = h.eigen().values;
    const double top = values[values.size() - 1];
    const auto excited = first_excited(h, cluster_tolerance(h, spec));
    mu = excited ? 0.5 * (*excited + top) : top + 1.0;
  }
  const int q = pf.q;
  return apply_log_filter(
      h, seed, [&](double x) { return q * std::log(std::abs(mu - x)); },
      [&](double x) { return (mu - x < 0.0 && (q % 2 == 1)) ? -1.0 : 1.0; }, "power filter");
}

std::pair<double, double> resolve_band(const HermitianOperator& h, const ChebyshevFilter& cf,
                                       const PrimitiveSpec& spec) {
  if (cf.band) {
    if (!(cf.band->first < cf.band->second)) {
      throw ValidationError("Chebyshev band is degenerate: need a < b");
    }
    return *cf.band;
  }
  if (spec.oracle_free) throw ValidationError("oracle-free Chebyshev filtering needs an explicit band");
  const auto& values = h.eigen().values;
  const double ground = values[0];
  const double top = values[values.size() - 1];
  const auto excited = first_excited(h, cluster_tolerance(h, spec));
  if (!excited) throw ValidationError("Chebyshev default band is empty: the spectrum is a single level");
  double a = *excited;
  double b = top;
  if (b - a <= cluster_tolerance(h, spec)) {
    // Single excited level: centre a band of half the gap on it.
    const double half = 0.5 * (a - ground);
    return {a - half, a + half};
  }
  const double margin = 0.01 * (b - a);
  return {a + margin, b - margin};
}

ComplexVector run_chebyshev(const HermitianOperator& h, const ComplexVector& seed,
                            const ChebyshevFilter& cf, const PrimitiveSpec& spec) {
  if (cf.degree < 0) throw ValidationError("Chebyshev degree must be >= 0");
  const auto [a, b] = resolve_band(h, cf, spec);
  const double centre = 0.5 * (a + b);
  const double half_width = 0.5 * (b - a);
  const int k = cf.degree;
  return apply_log_filter(
      h, seed, [&](double x) { return chebyshev_log_value(k, (x - centre) / half_width).first; },
      [&](double x) { return chebyshev_log_value(k, (x - centre) / half_width).second; },
      "Chebyshev filter");
}

ComplexVector run_shift_invert(const HermitianOperator& h, const ComplexVector& seed, const ShiftInvert& si,
                               const PrimitiveSpec& spec) {
  if (si.q < 0) throw ValidationError("shift-and-invert needs q >= 0");
  const double sigma = guarded_shift(h, si.sigma, cluster_tolerance(h, spec));
  ComplexVector v = normalized(seed, "shift-and-invert");
  for (int step = 0; step < si.q; ++step) v = normalized(solve_shifted(h, sigma, v), "shift-and-invert");
  return v;
}

ComplexVector run_base(const HermitianOperator& h, const ComplexVector& seed, const BaseFilter& filter,
                       const PrimitiveSpec& spec) {
  return std::visit(Overloaded{
                        [&](const ImaginaryTime& f) { return run_imaginary_time(h, seed, f, spec); },
                        [&](const PowerFilter& f) { return run_power(h, seed, f, spec); },
                        [&](const ChebyshevFilter& f) { return run_chebyshev(h, seed, f, spec); },
                        [&](const ShiftInvert& f) { return run_shift_invert(h, seed, f, spec); },
                    },
                    filter);
}

}  // namespace

std::string filter_name(const BaseFilter& filter) {
  return std::visit(Overloaded{
                        [](const ImaginaryTime&) { return std::string("imaginary_time"); },
                        [](const PowerFilter&) { return std::string("power"); },
                        [](const ChebyshevFilter&) { return std::string("chebyshev"); },
                        [](const ShiftInvert&) { return std::string("shift_invert"); },
                    },
                    filter);
}

std::string filter_name(const Filter& filter) {
  return std::visit(Overloaded{
                        [](const FoldedSpectrum&) { return std::string("folded"); },
                        [](const auto& f) { return filter_name(BaseFilter(f)); },
                    },
                    filter);
}

std::string to_string(SeedKind kind) {
  switch (kind) {
    case SeedKind::basis_state: return "basis_state";
    case SeedKind::given_vector: return "given_vector";
    case SeedKind::uniform_superposition: return "uniform_superposition";
  }
  return "unknown";
}

SeedKind parse_seed_kind(const std::string& name) {
  for (auto kind : {SeedKind::basis_state, SeedKind::given_vector, SeedKind::uniform_superposition}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("unknown seed policy '" + name + "'");
}

void PrimitiveSpec::validate() const {
  auto check_base = [](const BaseFilter& base) {
    std::visit(Overloaded{
                   [](const ImaginaryTime& f) {
                     if (!(f.beta >= 0.0)) throw ValidationError("imaginary time needs beta >= 0");
                   },
                   [](const PowerFilter& f) {
                     if (f.q < 0) throw ValidationError("power filter needs q >= 0");
                   },
                   [](const ChebyshevFilter& f) {
                     if (f.degree < 0) throw ValidationError("Chebyshev degree must be >= 0");
                     if (f.band && !(f.band->first < f.band->second)) {
                       throw ValidationError("Chebyshev band is degenerate: need a < b");
                     }
                   },
                   [](const ShiftInvert& f) {
                     if (f.q < 0) throw ValidationError("shift-and-invert needs q >= 0");
                   },
               },
               base);
  };
  std::visit(Overloaded{
                 [&](const FoldedSpectrum& f) { check_base(f.inner); },
                 [&](const auto& f) { check_base(BaseFilter(f)); },
             },
             filter);
  if (seed.kind == SeedKind::basis_state && seed.index < 0) {
    throw ValidationError("basis-state seed index must be >= 0");
  }
  if (cluster_tol && !(*cluster_tol >= 0.0)) throw ValidationError("cluster_tol must be >= 0");
}

ComplexVector make_seed(const SeedPolicy& policy, Index physical_dim, Index total_dim) {
  ComplexVector seed = ComplexVector::Zero(total_dim);
  switch (policy.kind) {
    case SeedKind::basis_state:
      if (policy.index < 0 || policy.index >= physical_dim) {
        throw ValidationError("basis-state seed index " + std::to_string(policy.index) +
                              " is outside the physical space of dimension " + std::to_string(physical_dim));
      }
      seed[policy.index] = 1.0;
      break;
    case SeedKind::uniform_superposition:
      seed.head(physical_dim).setConstant(Complex(1.0 / std::sqrt(static_cast<double>(physical_dim)), 0.0));
      break;
    case SeedKind::given_vector:
      if (policy.vector.size() != physical_dim && policy.vector.size() != total_dim) {
        throw ValidationError("given seed vector has the wrong length");
      }
      seed.head(policy.vector.size()) = policy.vector;
      break;
  }
  if (!(seed.norm() > 0.0)) throw ValidationError("seed vector is zero");
  return seed / seed.norm();
}

double guarded_shift(const HermitianOperator& h, double sigma, double cluster_tol) {
  const auto& values = h.eigen().values;
  const double guard = singular_guard(h);
  Index nearest = 0;
  for (Index k = 1; k < values.size(); ++k) {
    if (std::abs(values[k] - sigma) < std::abs(values[nearest] - sigma)) nearest = k;
  }
  if (std::abs(values[nearest] - sigma) >= guard) return sigma;

  // Cluster containing the nearest level, and the nearest level outside it.
  Index lo = nearest;
  Index hi = nearest;
  while (lo > 0 && values[lo] - values[lo - 1] <= cluster_tol) --lo;
  while (hi + 1 < values.size() && values[hi + 1] - values[hi] <= cluster_tol) ++hi;
  const double below = lo > 0 ? values[lo] - values[lo - 1] : std::numeric_limits<double>::infinity();
  const double above = hi + 1 < values.size() ? values[hi + 1] - values[hi] : std::numeric_limits<double>::infinity();
  const bool upward = above <= below;
  const double inf = std::numeric_limits<double>::infinity();
  if (upward) return std::nextafter(values[hi] + guard, inf);
  return std::nextafter(values[lo] - guard, -inf);
}

double gershgorin_lower_bound(const ComplexMatrix& m) {
  double bound = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < m.rows(); ++i) {
    const double radius = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
    bound = std::min(bound, m(i, i).real() - radius);
  }
  return bound;
}

double gershgorin_upper_bound(const ComplexMatrix& m) {
  double bound = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < m.rows(); ++i) {
    const double radius = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
    bound = std::max(bound, m(i, i).real() + radius);
  }
  return bound;
}

std::pair<double, double> chebyshev_log_value(int k, double t) {
  if (std::abs(t) <= 1.0) {
    const double value = std::cos(k * std::acos(t));
    return {std::log(std::abs(value)), value < 0.0 ? -1.0 : 1.0};
  }
  const double a = std::acosh(std::abs(t));
  // cosh(k a) = e^{k a} (1 + e^{-2 k a}) / 2
  const double log_value = k * a + std::log1p(std::exp(-2.0 * k * a)) - M_LN2;
  const double sign = (t < 0.0 && (k % 2 == 1)) ? -1.0 : 1.0;
  return {log_value, sign};
}

ComplexVector prepare(const HermitianOperator& h, const ComplexVector& seed, const PrimitiveSpec& spec) {
  if (seed.size() != h.dim()) {
    throw ValidationError("seed length " + std::to_string(seed.size()) + " does not match operator dimension " +
                          std::to_string(h.dim()));
  }
  if (!(seed.norm() > 0.0)) throw ValidationError("seed vector is zero");
  spec.validate();
  if (const auto* folded = std::get_if<FoldedSpectrum>(&spec.filter)) {
    const auto& eig = h.eigen();
    const RealVector squared = (eig.values.array() - folded->sigma).square();
    const auto folded_op = HermitianOperator::from_spectrum(eig.vectors, squared);
    return run_base(folded_op, seed, folded->inner, spec);
  }
  return std::visit(Overloaded{
                        [&](const FoldedSpectrum&) -> ComplexVector { return {}; },
                        [&](const auto& f) { return run_base(h, seed, BaseFilter(f), spec); },
                    },
                    spec.filter);
}

double leakage(const ComplexVector& c, const EigenspaceHandle& target) {
  const double norm_sq = c.squaredNorm();
  if (!(norm_sq > 0.0)) return 1.0;
  const ComplexVector outside = c - target.basis * (target.basis.adjoint() * c);
  return std::clamp(outside.squaredNorm() / norm_sq, 0.0, 1.0);
}

FootPoint foot_point(const ComplexVector& c, const EigenspaceHandle& target) {
  FootPoint fp;
  ComplexVector projection = target.basis.adjoint() * c;
  fp.alpha = projection.norm();
  fp.orthogonal = fp.alpha < kOrthogonalAlpha;
  fp.direction = fp.orthogonal ? ComplexVector::Zero(projection.size()) : ComplexVector(projection / fp.alpha);
  return fp;
}

}  // namespace qrsi
