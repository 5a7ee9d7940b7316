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

#include "qrsi/report_io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qrsi/error.hpp"

namespace qrsi {

namespace {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json numbers(const RealVector& v) {
  Json out = Json::array();
  for (Index j = 0; j < v.size(); ++j) out.push_back(number(v[j]));
  return out;
}

Json to_json(const RankDetection& rank) {
  return Json{{"g_hat", rank.g_hat},
              {"tau_applied", number(rank.tau_applied)},
              {"policy_applied", to_string(rank.applied)},
              {"below_threshold", rank.below_threshold}};
}

}  // namespace

Json to_json(const EnsembleReport& report) {
  Json branches = Json::array();
  for (const auto& b : report.branches) {
    branches.push_back({{"branch_index", b.branch_index},
                        {"epsilon", number(b.epsilon)},
                        {"alpha", number(b.alpha)},
                        {"rotation_seed", b.rotation_seed},
                        {"orthogonal", b.orthogonal},
                        {"spectral_deviation", number(b.spectral_deviation)}});
  }
  Json out{{"g_hat", report.rank.g_hat},
           {"tau_applied", number(report.rank.tau_applied)},
           {"threshold_policy_applied", to_string(report.rank.applied)},
           {"gap_ratio", number(report.gap_ratio)},
           {"singular_values", numbers(report.singular_values)},
           {"max_leakage", number(report.max_leakage)},
           {"branches", branches}};
  out["diagnostic"] = {{"g_exact", report.g_exact()},
                       {"target_energy", number(report.target.energy)},
                       {"target_gap", number(report.target.gap)},
                       {"foot_point_singular_values", numbers(report.foot_point_values)}};
  if (report.gram_rank) out["gram"] = to_json(*report.gram_rank);
  out["warnings"] = report.warnings;
  return out;
}

Json to_json(const SvdGapCheck& c) {
  return Json{{"g", c.g},
              {"branches", c.branches},
              {"epsilon_q", number(c.epsilon_q)},
              {"sigma_g_C", number(c.sigma_g_c)},
              {"sigma_g1_C", number(c.sigma_g1_c)},
              {"sigma_g_F", number(c.sigma_g_f)},
              {"bound", number(c.bound)},
              {"allowance", number(c.allowance)},
              {"upper_slack", number(c.upper_slack)},
              {"lower_slack", number(c.lower_slack)},
              {"upper_holds", c.upper_holds},
              {"lower_holds", c.lower_holds}};
}

Json to_json(const std::vector<SweepLevel>& levels) {
  Json out = Json::array();
  for (const auto& l : levels) {
    out.push_back({{"level_index", l.level_index},
                   {"sigma", number(l.sigma)},
                   {"g_exact", l.g_exact},
                   {"g_hat", l.g_hat},
                   {"ambiguous", l.ambiguous}});
  }
  return out;
}

Json to_json(const AntiConcentrationEstimate& e) {
  return Json{{"eta_hat", number(e.eta_hat)},
              {"delta", number(e.delta)},
              {"ci_half_width", number(e.ci_half_width)},
              {"hyperplanes", e.hyperplanes},
              {"samples", e.samples},
              {"worst_hyperplane", e.worst_hyperplane},
              {"protocol", e.protocol}};
}

Json to_json(const SpanningReport& r) {
  Json out{{"g", r.g},
           {"batch", r.batch},
           {"trials", r.trials},
           {"successes", r.successes},
           {"success_fraction", number(r.success_fraction)},
           {"bound_eta_pow_g", r.bound_eta_pow_g ? number(*r.bound_eta_pow_g) : Json(nullptr)},
           {"eta", r.eta ? number(*r.eta) : Json(nullptr)},
           {"epsilon", r.epsilon ? number(*r.epsilon) : Json(nullptr)},
           {"amplified_m", r.amplified_m ? Json(*r.amplified_m) : Json(nullptr)}};
  return out;
}

Json to_json(const SerialReport& r) {
  return Json{{"samples", r.samples},
              {"overlap_before", number(r.overlap_before)},
              {"mean_overlap", number(r.mean_overlap)},
              {"standard_error", number(r.standard_error)},
              {"baseline_g_over_n", number(r.baseline)}};
}

Json to_json(const FootPointTest& t) {
  Json ks = Json::array();
  for (const auto& r : t.ks) {
    ks.push_back({{"direction_index", r.direction_index},
                  {"statistic", number(r.statistic)},
                  {"p_value", number(r.p_value)}});
  }
  return Json{{"g", t.g},
              {"samples", t.samples},
              {"ks", ks},
              {"significance", t.significance},
              {"bonferroni_threshold", number(t.threshold)},
              {"passed", t.passed},
              {"underpowered", t.underpowered}};
}

std::string singular_values_csv(const RealVector& values) {
  std::string out = "j,sigma\n";
  char line[64];
  for (Index j = 0; j < values.size(); ++j) {
    std::snprintf(line, sizeof line, "%lld,%.17e\n", static_cast<long long>(j + 1), values[j]);
    out += line;
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

}  // namespace qrsi
