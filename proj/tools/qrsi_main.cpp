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

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "qrsi/error.hpp"
#include "qrsi/experiment.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericalExit = 3;
constexpr int kVerifyExit = 1;

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--config", opt.config, "experiment config file")->required();
  sub->add_option("--out", opt.out, "output directory (overrides [experiment] output)");
  sub->add_option("--seed", opt.seed, "master seed (overrides [experiment] seed)");
  sub->add_option("--threads", opt.threads, "worker cap; results do not depend on it");
}

qrsi::ExperimentConfig load(const Options& opt) {
  qrsi::ExperimentConfig cfg = qrsi::load_experiment_config(opt.config);
  if (opt.out) cfg.output_dir = *opt.out;
  if (opt.seed) cfg.master_seed = *opt.seed;
  if (opt.threads) cfg.threads = *opt.threads;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized subspace iteration for degenerate eigenspaces"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::pair<std::string, std::string>> experiments{
      {"toric_panel", "rotated/unrotated and four-primitive singular-value spectra"},
      {"planted", "planted-degeneracy instance, rotated and unrotated"},
      {"sweep", "shift-and-invert degeneracy sweep over levels"},
      {"eta", "anti-concentration estimate"},
      {"spanning", "spanning probability of branch batches"},
      {"serial", "overlap after rotating a prepared state"},
      {"footpoint", "foot-point distribution KS test"},
  };
  std::vector<std::pair<std::string, CLI::App*>> runs;
  for (const auto& [name, help] : experiments) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, opt);
    runs.emplace_back(name, sub);
  }
  CLI::App* verify = app.add_subcommand("verify", "re-check an output directory against its config");
  add_common(verify, opt);
  CLI::App* exporter = app.add_subcommand("export", "write the instance Hamiltonian to a matrix file");
  add_common(exporter, opt);
  std::string export_path = "hamiltonian.qmat";
  std::string export_format = "binary";
  exporter->add_option("--file", export_path, "matrix file name inside the output directory");
  exporter->add_option("--format", export_format, "binary or csv")->check(CLI::IsMember({"binary", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    qrsi::ExperimentConfig cfg = load(opt);
    if (verify->parsed()) {
      const auto result = qrsi::verify_outputs(cfg, cfg.output_dir);
      for (const auto& p : result.problems) std::cerr << "verify: " << p << "\n";
      std::cout << (result.ok ? "consistent" : "inconsistent") << "\n";
      return result.ok ? 0 : kVerifyExit;
    }
    if (exporter->parsed()) {
      const auto format = export_format == "csv" ? qrsi::MatrixFormat::csv : qrsi::MatrixFormat::binary;
      std::cout << qrsi::export_instance(cfg, cfg.output_dir / export_path, format).string() << "\n";
      return 0;
    }
    for (const auto& [name, sub] : runs) {
      if (!sub->parsed()) continue;
      const auto requested = qrsi::parse_experiment_kind(name);
      if (requested != cfg.kind) {
        throw qrsi::ConfigError("config describes a '" + qrsi::to_string(cfg.kind) + "' experiment, not '" + name +
                                "'");
      }
      const auto output = qrsi::run_experiment(cfg);
      std::cout << output.summary.dump(2) << "\n";
      for (const auto& f : output.files) std::cerr << "wrote " << f.string() << "\n";
    }
    return 0;
  } catch (const qrsi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const qrsi::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const qrsi::NoLevelNear& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const qrsi::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalExit;
  }
}
