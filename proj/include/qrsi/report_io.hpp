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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrsi/engine.hpp"
#include "qrsi/stats.hpp"

namespace qrsi {

using Json = nlohmann::ordered_json;

/// Keys: g_hat, tau_applied, gap_ratio, singular_values, max_leakage and a
/// branches array of {branch_index, epsilon, alpha, rotation_seed,
/// orthogonal}, plus diagnostics. Non-finite numbers become null.
Json to_json(const EnsembleReport& report);
Json to_json(const SvdGapCheck& check);
Json to_json(const std::vector<SweepLevel>& levels);
Json to_json(const AntiConcentrationEstimate& estimate);
Json to_json(const SpanningReport& report);
Json to_json(const SerialReport& report);
Json to_json(const FootPointTest& test);

/// Header `j,sigma`, then one row per value with 1-based j and %.17e.
std::string singular_values_csv(const RealVector& values);

/// Writes `content` verbatim; ConfigError if the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of `data`.
std::string sha256_hex(const std::string& data);

}  // namespace qrsi
