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
#include <optional>
#include <string>
#include <vector>

#include "qrsi/engine.hpp"
#include "qrsi/hamiltonians.hpp"
#include "qrsi/report_io.hpp"

namespace qrsi {

enum class ExperimentKind { toric_panel, planted, sweep, eta, spanning, serial, footpoint };
enum class InstanceKind { toric, planted, matrix };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(InstanceKind kind);
InstanceKind parse_instance_kind(const std::string& name);

/// Four-primitive comparison run by toric_panel next to the configured
/// rotated/unrotated pair.
struct PanelParams {
  double beta = 8.0;
  int power_q = 12;
  int chebyshev_degree = 16;
  double shift_sigma = -8.0;
  int shift_q = 4;
};

struct StatsParams {
  std::vector<double> deltas{0.1};
  Index hyperplanes = 200;
  Index samples = 2000;
  Index batch = 0;  // 0: the target degeneracy
  Index trials = 200;
  std::optional<double> eta;
  double epsilon = 0.01;
  Index directions = 5;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::toric_panel;
  InstanceKind instance = InstanceKind::toric;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "out";
  unsigned threads = 0;

  ToricSpec toric;
  PlantedSpec planted;
  std::filesystem::path matrix_path;
  /// Penalty for padding to a power of two, as a multiple of ||H||_F.
  double padding_factor = 10.0;
  /// Seed vector file for the given_vector seed policy.
  std::filesystem::path seed_file;

  /// Physical dimensions and the rotation seed are filled in from the
  /// instance and master_seed when the experiment runs.
  QrsiConfig qrsi;
  /// Target level; unset means the ground level.
  std::optional<double> target_energy;

  PanelParams panel;
  std::optional<std::vector<double>> sweep_sigmas;  // unset: every level
  StatsParams stats;

  void validate() const;
};

/// Parses the sectioned key = value format. ConfigError on syntax errors,
/// unknown sections or keys, and malformed values.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Writes every field back in the same format; parsing the result yields an
/// identical config.
std::string format_experiment_config(const ExperimentConfig& cfg);

/// Resolved configuration as JSON. Output directory and thread count are
/// left out: they cannot change any emitted number.
Json canonical_config_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

struct Instance {
  HermitianOperator h;
  Index physical_dim = 0;
};

Instance build_instance(const ExperimentConfig& cfg);

/// The engine configuration for `instance`: dimensions, master seed,
/// thread cap and target energy resolved.
QrsiConfig resolve_qrsi(const ExperimentConfig& cfg, const Instance& instance);

struct ExperimentOutput {
  std::vector<std::filesystem::path> files;  // data files, manifest excluded
  Json summary;
};

/// Runs the experiment, writes its data files and manifest.json into
/// cfg.output_dir. Every data file carries the config hash; the manifest
/// holds their SHA-256 digests and the only timestamp.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Writes the instance operator to `path`.
std::filesystem::path export_instance(const ExperimentConfig& cfg, const std::filesystem::path& path,
                                      MatrixFormat format);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Re-checks a run directory against `cfg`: manifest hash, per-file
/// digests and the config hash embedded in every data file.
VerifyResult verify_outputs(const ExperimentConfig& cfg, const std::filesystem::path& dir);

}  // namespace qrsi
