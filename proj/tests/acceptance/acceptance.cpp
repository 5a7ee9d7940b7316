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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Data-producing runs go through the checked-in experiment
// configs so the determinism check can replay them with another thread
// count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qrsi/engine.hpp"
#include "qrsi/experiment.hpp"
#include "qrsi/hamiltonians.hpp"
#include "qrsi/random.hpp"
#include "qrsi/stats.hpp"

using namespace qrsi;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kTorusGapRatio = 1e-4;        // sigma_5 / sigma_4, rotated
constexpr double kControlRatio = 1e-1;         // sigma_5 / sigma_4, unrotated
constexpr double kPlantedRatio = 1e-3;         // sigma_{g+1} / sigma_g and sigma_2 / sigma_1
constexpr double kSpectralDeviation = 1e-9;    // relative to ||H||
constexpr double kKsSignificance = 0.01;       // before Bonferroni over 5 directions
constexpr double kWilsonWidths = 3.0;
constexpr double kSerialStandardErrors = 3.0;
constexpr double kPictureTolerance = 1e-10;
constexpr double kSlopeLow = -0.75;
constexpr double kSlopeHigh = -0.25;
constexpr Index kHaarSpanMin = 198;            // of 200
constexpr double kC1Seconds = 30.0;
constexpr double kC2Seconds = 120.0;
constexpr double kC3Seconds = 300.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Line {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Line> lines;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  lines.push_back({id, name, pass, detail});
  std::printf("[%s] C%-2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Run {
  Json summary;
  double seconds = 0.0;
  std::vector<fs::path> files;
};

fs::path work_root() { return fs::temp_directory_path() / "qrsi_acceptance"; }

const std::vector<std::string> kConfigs{"fig1c", "fig1d", "fig1e", "fig7a", "fig7b", "footpoint_toric",
                                        "eta_toric", "serial_toric", "spanning_toric", "spanning_givens"};

Run run_config(const std::string& name, unsigned threads) {
  ExperimentConfig cfg = load_experiment_config(fs::path(QRSI_CONFIG_DIR) / (name + ".ini"));
  cfg.threads = threads;
  cfg.output_dir = work_root() / ("threads" + std::to_string(threads)) / name;
  fs::remove_all(cfg.output_dir);
  const auto t0 = Clock::now();
  ExperimentOutput out = run_experiment(cfg);
  return Run{out.summary, seconds_since(t0), out.files};
}

double sv_ratio(const Json& run, std::size_t upper, std::size_t lower) {
  const Json& sv = run["singular_values"];
  if (sv.size() <= upper) return 0.0;
  return sv[upper].get<double>() / sv[lower].get<double>();
}

bool bounds_hold(const Json& run) {
  return run["svd_gap_bounds"]["upper_holds"].get<bool>() && run["svd_gap_bounds"]["lower_holds"].get<bool>();
}

}  // namespace

int main() {
  std::map<std::string, Run> runs;
  std::vector<std::string> failures_to_run;
  for (const auto& name : kConfigs) {
    try {
      runs[name] = run_config(name, 1);
    } catch (const std::exception& e) {
      failures_to_run.push_back(name + ": " + e.what());
      std::printf("run %s failed: %s\n", name.c_str(), e.what());
    }
  }
  auto have = [&](std::initializer_list<const char*> names) {
    for (const char* n : names) {
      if (!runs.count(n)) return false;
    }
    return true;
  };
  std::vector<Json> bound_runs;

  // 1. Toric ground space.
  if (have({"fig1c"})) {
    const Json& panel = runs["fig1c"].summary["panel_c"];
    const Json& rot = panel["rotated"];
    const Json& ctl = panel["unrotated"];
    const double ratio = sv_ratio(rot, 4, 3);
    const bool control_flat = ctl.contains("error") || sv_ratio(ctl, 4, 3) >= kControlRatio ||
                              ctl["g_hat"].get<Index>() != 4;
    const double t = runs["fig1c"].seconds;
    report(1, "toric ground space", rot["g_hat"] == 4 && ratio <= kTorusGapRatio && control_flat && t <= kC1Seconds,
           "g_hat=" + rot["g_hat"].dump() + fmt(" s5/s4=%.2e", ratio) + " control g_hat=" +
               (ctl.contains("g_hat") ? ctl["g_hat"].dump() : std::string("n/a")) + fmt(" %.1fs", t));
    bound_runs.push_back(rot);
    if (ctl.contains("svd_gap_bounds")) bound_runs.push_back(ctl);
  } else {
    report(1, "toric ground space", false, "run failed");
  }

  // 2. Primitive agnosticism.
  if (have({"fig1d"})) {
    const Json& panel = runs["fig1d"].summary["panel_d"];
    bool ok = runs["fig1d"].seconds <= kC2Seconds;
    std::string detail;
    for (const char* name : {"imaginary_time", "power", "chebyshev", "shift_invert"}) {
      ok = ok && panel[name]["g_hat"] == 4;
      detail += std::string(name) + "=" + panel[name]["g_hat"].dump() + " ";
      bound_runs.push_back(panel[name]);
    }
    report(2, "primitive agnosticism", ok, detail + fmt("%.1fs", runs["fig1d"].seconds));
  } else {
    report(2, "primitive agnosticism", false, "run failed");
  }

  // 3. Spectral microscope.
  if (have({"fig1e"})) {
    const Json& levels = runs["fig1e"].summary["levels"];
    bool ok = levels.size() == 5 && runs["fig1e"].seconds <= kC3Seconds;
    std::string detail;
    for (const auto& l : levels) {
      ok = ok && l["g_hat"] == l["g_exact"];
      detail += l["g_hat"].dump() + "/" + l["g_exact"].dump() + " ";
    }
    report(3, "spectral microscope", ok, "g_hat/g_exact " + detail + fmt("%.1fs", runs["fig1e"].seconds));
  } else {
    report(3, "spectral microscope", false, "run failed");
  }

  // 4. Planted degeneracies.
  if (have({"fig7a", "fig7b"})) {
    bool ok = true;
    std::string detail;
    for (auto [name, g] : {std::pair{"fig7a", 6}, std::pair{"fig7b", 11}}) {
      const Json& rot = runs[name].summary["rotated"];
      const Json& ctl = runs[name].summary["unrotated"];
      const double ratio = sv_ratio(rot, static_cast<std::size_t>(g), static_cast<std::size_t>(g - 1));
      const double flat = sv_ratio(ctl, 1, 0);
      ok = ok && rot["g_hat"] == g && ratio <= kPlantedRatio && flat <= kPlantedRatio;
      detail += "g=" + std::to_string(g) + " g_hat=" + rot["g_hat"].dump() + fmt(" ratio=%.1e", ratio) +
                fmt(" unrotated s2/s1=%.1e; ", flat);
      bound_runs.push_back(rot);
      bound_runs.push_back(ctl);
    }
    report(4, "planted degeneracies", ok, detail);
  } else {
    report(4, "planted degeneracies", false, "run failed");
  }

  const HermitianOperator toric = build_toric(ToricSpec{});

  // 5. Spectral invariance.
  {
    RotationSpec spec;
    spec.physical_dim = 256;
    spec.master_seed = 505;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
      const auto rotated = sample_rotation(spec, i).conjugate(toric);
      worst = std::max(worst, (rotated.eigen().values - toric.eigen().values).cwiseAbs().maxCoeff());
    }
    const double rel = worst / toric.spectral_norm();
    report(5, "spectral invariance", rel <= kSpectralDeviation, fmt("max deviation %.2e ||H||", rel));
  }

  // 6. Foot-point law.
  if (have({"footpoint_toric"})) {
    const Json& r = runs["footpoint_toric"].summary;
    const double threshold = kKsSignificance / 5.0;
    bool ok = r["samples"] == 2000 && r["ks"].size() == 5;
    double worst = 1.0;
    for (const auto& k : r["ks"]) {
      worst = std::min(worst, k["p_value"].get<double>());
      ok = ok && k["p_value"].get<double>() > threshold;
    }
    report(6, "foot-point law", ok, fmt("min p=%.3g over 5 directions", worst) + fmt(" (threshold %.3g)", threshold));
  } else {
    report(6, "foot-point law", false, "run failed");
  }

  // 7. Haar anti-concentration.
  if (have({"eta_toric"})) {
    const Json& r = runs["eta_toric"].summary;
    bool ok = r["estimates"].size() == 3;
    std::string detail;
    for (const auto& e : r["estimates"]) {
      const double delta = e["delta"].get<double>();
      const double predicted = std::pow(std::cos(delta), 6.0);
      const double off = std::abs(e["eta_hat"].get<double>() - predicted) / e["ci_half_width"].get<double>();
      ok = ok && off <= kWilsonWidths && e["samples"] == 2000 && e["hyperplanes"] == 200;
      detail += fmt("d=%.2f ", delta) + fmt("eta=%.4f ", e["eta_hat"].get<double>()) +
                fmt("(%.2f widths) ", off);
    }
    report(7, "haar anti-concentration", ok, detail);
  } else {
    report(7, "haar anti-concentration", false, "run failed");
  }

  // 8. Sample-complexity arithmetic.
  {
    const Index m = amplified_branch_count(0.97, 4, 0.01);
    const bool from_run = have({"spanning_toric"}) && runs["spanning_toric"].summary["amplified_m"] == 24;
    report(8, "sample-complexity arithmetic", m == 24 && from_run, "M=" + std::to_string(m));
  }

  // 9. SVD gap bounds on every run plus the leakage scaling of the gap.
  {
    bool ok = !bound_runs.empty();
    for (const auto& r : bound_runs) ok = ok && bounds_hold(r);
    QrsiConfig cfg;
    cfg.branches = 20;
    cfg.rotation.physical_dim = 256;
    cfg.rotation.master_seed = 909;
    cfg.target_energy = toric.eigen().values[0];
    cfg.threshold = ThresholdPolicy::largest_log_gap();
    std::vector<double> x;
    std::vector<double> y;
    for (double beta : {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5}) {
      cfg.primitive.filter = ImaginaryTime{beta, std::nullopt};
      const EnsembleReport r = run_qrsi(toric, cfg);
      const SvdGapCheck c = verify_svd_gap_bounds(r);
      ok = ok && c.upper_holds && c.lower_holds;
      x.push_back(std::log(r.max_leakage));
      y.push_back(std::log(r.gap_ratio));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i] / static_cast<double>(x.size());
      my += y[i] / static_cast<double>(y.size());
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    ok = ok && slope >= kSlopeLow && slope <= kSlopeHigh;
    report(9, "svd gap bounds", ok,
           std::to_string(bound_runs.size() + x.size()) + " runs checked" + fmt(", slope %.3f", slope));
  }

  // 10. Serial failure.
  if (have({"serial_toric"})) {
    const Json& r = runs["serial_toric"].summary;
    const double mean = r["mean_overlap"].get<double>();
    const double se = r["standard_error"].get<double>();
    const double baseline = 4.0 / 256.0;
    const double off = std::abs(mean - baseline) / se;
    report(10, "serial failure", r["samples"] == 5000 && off <= kSerialStandardErrors,
           fmt("mean %.5f", mean) + fmt(" vs %.5f", baseline) + fmt(" (%.2f SE)", off));
  } else {
    report(10, "serial failure", false, "run failed");
  }

  // 11. Picture equivalence. Parameters are drawn at random; a shift drawn
  // from a continuum does not land on a level.
  {
    Rng pick = make_stream(1111, StreamDomain::test_directions, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto random_filter = [&](int kind) -> Filter {
      switch (kind) {
        case 0: return ImaginaryTime{0.5 + 3.0 * unit(pick), std::nullopt};
        case 1: return PowerFilter{2 + static_cast<int>(pick() % 10), std::nullopt};
        case 2: return ChebyshevFilter{4 + static_cast<int>(pick() % 13), std::nullopt};
        case 3: return ShiftInvert{-9.0 + 2.0 * unit(pick), 1 + static_cast<int>(pick() % 4)};
        default: return FoldedSpectrum{-5.0 + 2.0 * unit(pick), ImaginaryTime{0.2 + unit(pick), std::nullopt}};
      }
    };
    const EigenspaceHandle target = select_eigenspace(toric, -8.0, default_cluster_tol(toric));
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      QrsiConfig cfg;
      cfg.rotation.physical_dim = 256;
      cfg.rotation.master_seed = pick();
      cfg.primitive.filter = random_filter(k % 5);
      cfg.primitive.seed.index = static_cast<Index>(pick() % 256);
      const std::uint64_t branch = pick() % 1000;
      cfg.picture = Picture::state;
      const BranchResult s = run_branch(toric, cfg, target, branch);
      cfg.picture = Picture::hamiltonian;
      const BranchResult h = run_branch(toric, cfg, target, branch);
      worst = std::max(worst, (s.coefficients - h.coefficients).norm());
    }
    report(11, "picture equivalence", worst <= kPictureTolerance, fmt("max difference %.2e", worst));
  }

  // 12. Spanning probability.
  if (have({"spanning_toric", "spanning_givens"})) {
    const Json& haar = runs["spanning_toric"].summary;
    const Json& givens = runs["spanning_givens"].summary;
    const double floor = std::pow(8.0, -4.0);
    const bool ok = haar["trials"] == 200 && haar["successes"].get<Index>() >= kHaarSpanMin &&
                    givens["success_fraction"].get<double>() >= floor;
    report(12, "spanning probability", ok,
           "haar " + haar["successes"].dump() + "/200, givens " + givens["successes"].dump() + "/" +
               givens["trials"].dump());
  } else {
    report(12, "spanning probability", false, "run failed");
  }

  // 13. Determinism across thread counts.
  {
    bool ok = failures_to_run.empty();
    std::size_t compared = 0;
    std::string mismatch;
    for (const auto& name : kConfigs) {
      if (!runs.count(name)) continue;
      Run again;
      try {
        again = run_config(name, 4);
      } catch (const std::exception& e) {
        ok = false;
        mismatch += name + " rerun failed; ";
        continue;
      }
      const auto& first = runs[name].files;
      if (first.size() != again.files.size()) {
        ok = false;
        mismatch += name + " file count; ";
        continue;
      }
      for (std::size_t i = 0; i < first.size(); ++i) {
        ++compared;
        if (read_text_file(first[i]) != read_text_file(again.files[i])) {
          ok = false;
          mismatch += first[i].filename().string() + " ";
        }
      }
    }
    report(13, "determinism", ok,
           std::to_string(compared) + " files compared, threads 1 vs 4" +
               (mismatch.empty() ? std::string() : "; mismatches: " + mismatch));
  }

  int failed = 0;
  for (const auto& l : lines) failed += l.pass ? 0 : 1;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(lines.size()) - failed, lines.size());
  return failed == 0 ? 0 : 1;
}
