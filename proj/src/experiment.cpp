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

#include "qrsi/experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>
#include <set>
#include <sstream>

#include "qrsi/error.hpp"

namespace qrsi {

namespace {

namespace pt = boost::property_tree;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// ---------------------------------------------------------------- parsing

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <class T>
T parse_number(const std::string& text, const std::string& where) {
  const std::string s = trim(text);
  T value{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw ConfigError(where + ": cannot parse '" + s + "' as a number");
  }
  return value;
}

bool parse_bool(const std::string& text, const std::string& where) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(where + ": expected true or false, got '" + s + "'");
}

std::vector<double> parse_list(const std::string& text, const std::string& where) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_number<double>(item, where));
  if (out.empty()) throw ConfigError(where + ": empty list");
  return out;
}

/// Key lookup that remembers what was read so leftovers can be rejected.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty()) {
        throw ConfigError("key '" + section + "' must sit inside a [section]");
      }
    }
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto value = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!value) return std::nullopt;
    used_.insert(section + "." + key);
    return trim(*value);
  }

  template <class T>
  void number(const std::string& section, const std::string& key, T& out) {
    if (auto v = raw(section, key)) out = parse_number<T>(*v, section + "." + key);
  }
  template <class T>
  void number(const std::string& section, const std::string& key, std::optional<T>& out) {
    if (auto v = raw(section, key)) out = parse_number<T>(*v, section + "." + key);
  }
  void flag(const std::string& section, const std::string& key, bool& out) {
    if (auto v = raw(section, key)) out = parse_bool(*v, section + "." + key);
  }
  void text(const std::string& section, const std::string& key, std::string& out) {
    if (auto v = raw(section, key)) out = *v;
  }

  void reject_unused() const {
    for (const auto& [section, body] : tree_) {
      if (!kSections.count(section)) throw ConfigError("unknown section [" + section + "]");
      for (const auto& [key, value] : body) {
        if (!used_.count(section + "." + key)) {
          throw ConfigError("unknown or inapplicable key '" + key + "' in [" + section + "]");
        }
      }
    }
  }

 private:
  inline static const std::set<std::string> kSections{"experiment", "toric", "planted", "matrix", "qrsi",
                                                      "rotation", "primitive", "panel", "sweep", "stats"};
  const pt::ptree& tree_;
  std::set<std::string> used_;
};

template <class Parse>
auto parse_enum(Reader& r, const std::string& section, const std::string& key, Parse parse)
    -> std::optional<decltype(parse(std::string()))> {
  auto v = r.raw(section, key);
  if (!v) return std::nullopt;
  try {
    return parse(*v);
  } catch (const ValidationError& e) {
    throw ConfigError(section + "." + key + ": " + e.what());
  }
}

BaseFilter read_base_filter(Reader& r, const std::string& kind) {
  const std::string s = "primitive";
  if (kind == "imaginary_time") {
    ImaginaryTime f;
    r.number(s, "beta", f.beta);
    r.number(s, "steps", f.steps);
    return f;
  }
  if (kind == "power") {
    PowerFilter f;
    r.number(s, "q", f.q);
    r.number(s, "mu", f.mu);
    return f;
  }
  if (kind == "chebyshev") {
    ChebyshevFilter f;
    r.number(s, "degree", f.degree);
    std::optional<double> lo;
    std::optional<double> hi;
    r.number(s, "band_low", lo);
    r.number(s, "band_high", hi);
    if (lo.has_value() != hi.has_value()) throw ConfigError("primitive: band_low and band_high go together");
    if (lo) f.band = std::make_pair(*lo, *hi);
    return f;
  }
  if (kind == "shift_invert") {
    ShiftInvert f;
    r.number(s, "sigma", f.sigma);
    r.number(s, "q", f.q);
    return f;
  }
  if (kind == "folded") throw ConfigError("primitive: folded filters cannot nest");
  throw ConfigError("primitive: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------- formatting

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + fmt(xs[i]);
  return out;
}

using Section = std::vector<std::pair<std::string, std::string>>;

void put(Section& s, const std::string& key, const std::string& value) { s.emplace_back(key, value); }
void put(Section& s, const std::string& key, double value) { put(s, key, fmt(value)); }
template <class T>
void put_int(Section& s, const std::string& key, T value) {
  put(s, key, std::to_string(value));
}
void put_bool(Section& s, const std::string& key, bool value) { put(s, key, value ? "true" : "false"); }

void put_base_filter(Section& s, const BaseFilter& filter) {
  std::visit(Overloaded{
                 [&](const ImaginaryTime& f) {
                   put(s, "beta", f.beta);
                   if (f.steps) put_int(s, "steps", *f.steps);
                 },
                 [&](const PowerFilter& f) {
                   put_int(s, "q", f.q);
                   if (f.mu) put(s, "mu", *f.mu);
                 },
                 [&](const ChebyshevFilter& f) {
                   put_int(s, "degree", f.degree);
                   if (f.band) {
                     put(s, "band_low", f.band->first);
                     put(s, "band_high", f.band->second);
                   }
                 },
                 [&](const ShiftInvert& f) {
                   put(s, "sigma", f.sigma);
                   put_int(s, "q", f.q);
                 },
             },
             filter);
}

/// Ordered (section, entries) pairs shared by the text and JSON writers.
std::vector<std::pair<std::string, Section>> sections(const ExperimentConfig& cfg, bool execution) {
  std::vector<std::pair<std::string, Section>> out;

  Section ex;
  put(ex, "kind", to_string(cfg.kind));
  put(ex, "instance", to_string(cfg.instance));
  put_int(ex, "seed", cfg.master_seed);
  put(ex, "padding_factor", cfg.padding_factor);
  if (execution) {
    put(ex, "output", cfg.output_dir.string());
    put_int(ex, "threads", cfg.threads);
  }
  out.emplace_back("experiment", ex);

  Section toric;
  put_int(toric, "lx", cfg.toric.lx);
  put_int(toric, "ly", cfg.toric.ly);
  put(toric, "js", cfg.toric.js);
  put(toric, "jp", cfg.toric.jp);
  put(toric, "perturbation_scale", cfg.toric.perturbation_scale);
  put_int(toric, "perturbation_seed", cfg.toric.perturbation_seed);
  out.emplace_back("toric", toric);

  Section planted;
  put_int(planted, "dim", cfg.planted.dim);
  put_int(planted, "degeneracy", cfg.planted.degeneracy);
  put(planted, "gap", cfg.planted.gap);
  put(planted, "ground_energy", cfg.planted.ground_energy);
  put_int(planted, "seed", cfg.planted.seed);
  put_bool(planted, "structured", cfg.planted.structured_ground);
  out.emplace_back("planted", planted);

  Section matrix;
  if (!cfg.matrix_path.empty()) put(matrix, "path", cfg.matrix_path.string());
  out.emplace_back("matrix", matrix);

  const QrsiConfig& q = cfg.qrsi;
  Section qs;
  put_int(qs, "branches", q.branches);
  put(qs, "picture", to_string(q.picture));
  put(qs, "threshold", to_string(q.threshold.kind));
  if (q.threshold.kind == ThresholdPolicy::Kind::fixed || q.threshold.kind == ThresholdPolicy::Kind::relative) {
    put(qs, "threshold_value", q.threshold.value);
  }
  put(qs, "target_energy", cfg.target_energy ? fmt(*cfg.target_energy) : std::string("ground"));
  if (q.cluster_tol) put(qs, "cluster_tol", *q.cluster_tol);
  put(qs, "gram", to_string(q.gram.kind));
  if (q.gram.kind == GramMode::Kind::shot_noise) {
    put_int(qs, "gram_shots", q.gram.shots);
    put_int(qs, "gram_seed", q.gram.seed);
  }
  out.emplace_back("qrsi", qs);

  Section rot;
  put(rot, "kind", to_string(q.rotation.kind));
  if (q.rotation.givens_count) put_int(rot, "givens_count", *q.rotation.givens_count);
  if (q.rotation.householder_count) put_int(rot, "householder_count", *q.rotation.householder_count);
  out.emplace_back("rotation", rot);

  const PrimitiveSpec& p = q.primitive;
  Section prim;
  put(prim, "kind", filter_name(p.filter));
  std::visit(Overloaded{
                 [&](const FoldedSpectrum& f) {
                   put(prim, "fold_sigma", f.sigma);
                   put(prim, "inner", filter_name(f.inner));
                   put_base_filter(prim, f.inner);
                 },
                 [&](const auto& f) { put_base_filter(prim, BaseFilter(f)); },
             },
             p.filter);
  put(prim, "seed", to_string(p.seed.kind));
  if (p.seed.kind == SeedKind::basis_state) put_int(prim, "seed_index", p.seed.index);
  if (p.seed.kind == SeedKind::given_vector) put(prim, "seed_file", cfg.seed_file.string());
  put_bool(prim, "oracle_free", p.oracle_free);
  out.emplace_back("primitive", prim);

  Section panel;
  put(panel, "beta", cfg.panel.beta);
  put_int(panel, "power_q", cfg.panel.power_q);
  put_int(panel, "chebyshev_degree", cfg.panel.chebyshev_degree);
  put(panel, "shift_sigma", cfg.panel.shift_sigma);
  put_int(panel, "shift_q", cfg.panel.shift_q);
  out.emplace_back("panel", panel);

  Section sweep;
  put(sweep, "sigmas", cfg.sweep_sigmas ? fmt_list(*cfg.sweep_sigmas) : std::string("auto"));
  out.emplace_back("sweep", sweep);

  const StatsParams& st = cfg.stats;
  Section stats;
  put(stats, "deltas", fmt_list(st.deltas));
  put_int(stats, "hyperplanes", st.hyperplanes);
  put_int(stats, "samples", st.samples);
  put_int(stats, "batch", st.batch);
  put_int(stats, "trials", st.trials);
  if (st.eta) put(stats, "eta", *st.eta);
  put(stats, "epsilon", st.epsilon);
  put_int(stats, "directions", st.directions);
  out.emplace_back("stats", stats);
  return out;
}

// ---------------------------------------------------------------- output

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class OutputWriter {
 public:
  OutputWriter(const ExperimentConfig& cfg) : dir_(cfg.output_dir), hash_(config_hash(cfg)),
                                              config_(canonical_config_json(cfg)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) {
      throw ConfigError("cannot create output directory " + dir_.string());
    }
  }

  void csv(const std::string& name, const std::string& body) {
    write(name, "# config_hash=" + hash_ + "\n" + body);
  }

  void json(const std::string& name, const Json& result) {
    Json doc{{"config_hash", hash_}, {"config", config_}, {"result", result}};
    write(name, doc.dump(2) + "\n");
  }

  void finish() {
    Json files = Json::array();
    for (const auto& [name, digest] : digests_) files.push_back({{"name", name}, {"sha256", digest}});
    Json manifest{{"config_hash", hash_}, {"files", files}, {"generated_at", utc_timestamp()}};
    write_text_file(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

  const std::vector<std::filesystem::path>& files() const { return paths_; }

 private:
  void write(const std::string& name, const std::string& content) {
    write_text_file(dir_ / name, content);
    digests_.emplace_back(name, sha256_hex(content));
    paths_.push_back(dir_ / name);
  }

  std::filesystem::path dir_;
  std::string hash_;
  Json config_;
  std::vector<std::pair<std::string, std::string>> digests_;
  std::vector<std::filesystem::path> paths_;
};

Json run_record(const EnsembleReport& report) {
  Json out = to_json(report);
  out["svd_gap_bounds"] = to_json(verify_svd_gap_bounds(report));
  return out;
}

/// Rotated run plus the identity-rotation control.
Json rotated_pair(const HermitianOperator& h, const QrsiConfig& q, OutputWriter& out, const std::string& prefix) {
  Json runs;
  const EnsembleReport rotated = run_qrsi(h, q);
  out.csv(prefix + "_rotated.csv", singular_values_csv(rotated.singular_values));
  runs["rotated"] = run_record(rotated);

  QrsiConfig control = q;
  control.rotation.kind = RotationKind::identity;
  try {
    const EnsembleReport unrotated = run_qrsi(h, control);
    out.csv(prefix + "_unrotated.csv", singular_values_csv(unrotated.singular_values));
    runs["unrotated"] = run_record(unrotated);
  } catch (const DegenerateEnsemble& e) {
    runs["unrotated"] = Json{{"error", e.what()}};
  }
  return runs;
}

Json cmd_toric_panel(const ExperimentConfig& cfg, const Instance& inst, OutputWriter& out) {
  const QrsiConfig q = resolve_qrsi(cfg, inst);
  Json summary{{"panel_c", rotated_pair(inst.h, q, out, "panel_c")}};
  const std::vector<std::pair<std::string, Filter>> primitives{
      {"imaginary_time", ImaginaryTime{cfg.panel.beta, std::nullopt}},
      {"power", PowerFilter{cfg.panel.power_q, std::nullopt}},
      {"chebyshev", ChebyshevFilter{cfg.panel.chebyshev_degree, std::nullopt}},
      {"shift_invert", ShiftInvert{cfg.panel.shift_sigma, cfg.panel.shift_q}},
  };
  Json panel_d;
  for (const auto& [name, filter] : primitives) {
    QrsiConfig run = q;
    run.primitive.filter = filter;
    const EnsembleReport report = run_qrsi(inst.h, run);
    out.csv("panel_d_" + name + ".csv", singular_values_csv(report.singular_values));
    panel_d[name] = run_record(report);
  }
  summary["panel_d"] = panel_d;
  out.json("summary.json", summary);
  return summary;
}

Json cmd_planted(const ExperimentConfig& cfg, const Instance& inst, OutputWriter& out) {
  const Json summary = rotated_pair(inst.h, resolve_qrsi(cfg, inst), out, "planted");
  out.json("summary.json", summary);
  return summary;
}

Json cmd_sweep(const ExperimentConfig& cfg, const Instance& inst, OutputWriter& out) {
  const auto levels = spectral_sweep(inst.h, resolve_qrsi(cfg, inst), cfg.sweep_sigmas);
  std::string table = "level_index,sigma,g_exact,g_hat\n";
  char line[96];
  for (const auto& l : levels) {
    std::snprintf(line, sizeof line, "%lld,%.17e,%lld,%lld\n", static_cast<long long>(l.level_index), l.sigma,
                  static_cast<long long>(l.g_exact), static_cast<long long>(l.g_hat));
    table += line;
    out.csv("level_" + std::to_string(l.level_index) + ".csv", singular_values_csv(l.singular_values));
  }
  out.csv("levels.csv", table);
  const Json summary{{"levels", to_json(levels)}};
  out.json("summary.json", summary);
  return summary;
}

Json cmd_eta(const ExperimentConfig& cfg, const Instance& inst, OutputWriter& out) {
  const QrsiConfig q = resolve_qrsi(cfg, inst);
  const FootPointSample fp = collect_foot_points(inst.h, q, cfg.stats.samples);
  const Index g = fp.target.degeneracy();
  Json estimates = Json::array();
  for (double delta : cfg.stats.deltas) {
    Json e = to_json(estimate_eta_from(fp.directions, delta, cfg.stats.hyperplanes, q.rotation.master_seed));
    e["haar_reference"] = std::pow(std::cos(delta), 2.0 * static_cast<double>(g - 1));
    estimates.push_back(e);
  }
  const Json summary{{"g", g}, {"orthogonal_branches", fp.orthogonal}, {"estimates", estimates}};
  out.json("eta.json", summary);
  return summary;
}

Json cmd_spanning(const ExperimentConfig& cfg, const Instance& inst, OutputWriter& out) {
  const QrsiConfig q = resolve_qrsi(cfg, inst);
  const Index batch = cfg.stats.batch > 0
                          ? cfg.stats.batch
                          : select_eigenspace(inst.h, q.target_energy,
                                              q.cluster_tol ? *q.cluster_tol : default_cluster_tol(inst.h))
                                .degeneracy();
  const SpanningReport r = spanning_trials(inst.h, q, batch, cfg.stats.trials, cfg.stats.eta, cfg.stats.epsilon);
  Json summary = to_json(r);
  summary["givens_floor_8_pow_minus_g"] = std::pow(8.0, -static_cast<double>(r.g));
  out.json("spanning.json", summary);
  return summary;
}

Json cmd_serial(const ExperimentConfig& cfg, const Instance& inst, OutputWriter& out) {
  const Json summary = to_json(serial_baseline(inst.h, resolve_qrsi(cfg, inst), cfg.stats.samples));
  out.json("serial.json", summary);
  return summary;
}

Json cmd_footpoint(const ExperimentConfig& cfg, const Instance& inst, OutputWriter& out) {
  const Json summary =
      to_json(footpoint_distribution_test(inst.h, resolve_qrsi(cfg, inst), cfg.stats.samples, cfg.stats.directions));
  out.json("footpoint.json", summary);
  return summary;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::toric_panel: return "toric_panel";
    case ExperimentKind::planted: return "planted";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::eta: return "eta";
    case ExperimentKind::spanning: return "spanning";
    case ExperimentKind::serial: return "serial";
    case ExperimentKind::footpoint: return "footpoint";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  using K = ExperimentKind;
  for (auto kind : {K::toric_panel, K::planted, K::sweep, K::eta, K::spanning, K::serial, K::footpoint}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("unknown experiment kind '" + name + "'");
}

std::string to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::toric: return "toric";
    case InstanceKind::planted: return "planted";
    case InstanceKind::matrix: return "matrix";
  }
  return "unknown";
}

InstanceKind parse_instance_kind(const std::string& name) {
  for (auto kind : {InstanceKind::toric, InstanceKind::planted, InstanceKind::matrix}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("unknown instance kind '" + name + "'");
}

void ExperimentConfig::validate() const {
  try {
    if (instance == InstanceKind::toric) toric.validate();
    if (instance == InstanceKind::planted) planted.validate();
    if (instance == InstanceKind::matrix && matrix_path.empty()) throw ValidationError("[matrix] path is required");
    if (!(padding_factor > 0.0)) throw ValidationError("padding_factor must be > 0");
    QrsiConfig probe = qrsi;
    probe.rotation.physical_dim = 1;
    probe.rotation.padded_dim = 0;
    probe.primitive.seed.index = 0;
    probe.validate();
    if (qrsi.primitive.seed.index < 0) throw ValidationError("seed_index must be >= 0");
    if (qrsi.primitive.seed.kind == SeedKind::given_vector && seed_file.empty()) {
      throw ValidationError("given_vector seed needs primitive.seed_file");
    }
    if (stats.deltas.empty()) throw ValidationError("stats.deltas is empty");
    for (double d : stats.deltas) {
      if (!(d >= 0.0)) throw ValidationError("stats.deltas must be >= 0");
    }
    if (stats.hyperplanes < 1 || stats.samples < 1 || stats.trials < 1 || stats.directions < 1 || stats.batch < 0) {
      throw ValidationError("stats counts must be positive");
    }
    if (!(stats.epsilon > 0.0 && stats.epsilon < 1.0)) throw ValidationError("stats.epsilon must be in (0, 1)");
    if (stats.eta && !(*stats.eta > 0.0 && *stats.eta <= 1.0)) throw ValidationError("stats.eta must be in (0, 1]");
    if (kind == ExperimentKind::sweep && !std::holds_alternative<ShiftInvert>(qrsi.primitive.filter)) {
      throw ValidationError("sweep needs primitive.kind = shift_invert");
    }
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  Reader r(tree);
  ExperimentConfig cfg;

  if (auto k = parse_enum(r, "experiment", "kind", parse_experiment_kind)) cfg.kind = *k;
  if (auto k = parse_enum(r, "experiment", "instance", parse_instance_kind)) cfg.instance = *k;
  r.number("experiment", "seed", cfg.master_seed);
  r.number("experiment", "padding_factor", cfg.padding_factor);
  if (auto v = r.raw("experiment", "output")) cfg.output_dir = *v;
  r.number("experiment", "threads", cfg.threads);

  r.number("toric", "lx", cfg.toric.lx);
  r.number("toric", "ly", cfg.toric.ly);
  r.number("toric", "js", cfg.toric.js);
  r.number("toric", "jp", cfg.toric.jp);
  r.number("toric", "perturbation_scale", cfg.toric.perturbation_scale);
  r.number("toric", "perturbation_seed", cfg.toric.perturbation_seed);

  r.number("planted", "dim", cfg.planted.dim);
  r.number("planted", "degeneracy", cfg.planted.degeneracy);
  r.number("planted", "gap", cfg.planted.gap);
  r.number("planted", "ground_energy", cfg.planted.ground_energy);
  r.number("planted", "seed", cfg.planted.seed);
  r.flag("planted", "structured", cfg.planted.structured_ground);

  if (auto v = r.raw("matrix", "path")) cfg.matrix_path = *v;

  QrsiConfig& q = cfg.qrsi;
  r.number("qrsi", "branches", q.branches);
  if (auto k = parse_enum(r, "qrsi", "picture", parse_picture)) q.picture = *k;
  if (auto k = parse_enum(r, "qrsi", "threshold", parse_threshold_kind)) q.threshold.kind = *k;
  if (q.threshold.kind == ThresholdPolicy::Kind::fixed || q.threshold.kind == ThresholdPolicy::Kind::relative) {
    r.number("qrsi", "threshold_value", q.threshold.value);
  }
  if (auto v = r.raw("qrsi", "target_energy"); v && *v != "ground") {
    cfg.target_energy = parse_number<double>(*v, "qrsi.target_energy");
  }
  r.number("qrsi", "cluster_tol", q.cluster_tol);
  if (auto k = parse_enum(r, "qrsi", "gram", parse_gram_kind)) q.gram.kind = *k;
  if (q.gram.kind == GramMode::Kind::shot_noise) {
    r.number("qrsi", "gram_shots", q.gram.shots);
    r.number("qrsi", "gram_seed", q.gram.seed);
  }

  if (auto k = parse_enum(r, "rotation", "kind", parse_rotation_kind)) q.rotation.kind = *k;
  r.number("rotation", "givens_count", q.rotation.givens_count);
  r.number("rotation", "householder_count", q.rotation.householder_count);

  std::string kind = "shift_invert";
  r.text("primitive", "kind", kind);
  if (kind == "folded") {
    FoldedSpectrum folded;
    r.number("primitive", "fold_sigma", folded.sigma);
    std::string inner = "imaginary_time";
    r.text("primitive", "inner", inner);
    folded.inner = read_base_filter(r, inner);
    q.primitive.filter = folded;
  } else {
    std::visit([&](const auto& f) { q.primitive.filter = f; }, read_base_filter(r, kind));
  }
  if (auto k = parse_enum(r, "primitive", "seed", parse_seed_kind)) q.primitive.seed.kind = *k;
  if (q.primitive.seed.kind == SeedKind::basis_state) r.number("primitive", "seed_index", q.primitive.seed.index);
  if (q.primitive.seed.kind == SeedKind::given_vector) {
    if (auto v = r.raw("primitive", "seed_file")) cfg.seed_file = *v;
  }
  r.flag("primitive", "oracle_free", q.primitive.oracle_free);

  r.number("panel", "beta", cfg.panel.beta);
  r.number("panel", "power_q", cfg.panel.power_q);
  r.number("panel", "chebyshev_degree", cfg.panel.chebyshev_degree);
  r.number("panel", "shift_sigma", cfg.panel.shift_sigma);
  r.number("panel", "shift_q", cfg.panel.shift_q);

  if (auto v = r.raw("sweep", "sigmas"); v && *v != "auto") cfg.sweep_sigmas = parse_list(*v, "sweep.sigmas");

  if (auto v = r.raw("stats", "deltas")) cfg.stats.deltas = parse_list(*v, "stats.deltas");
  r.number("stats", "hyperplanes", cfg.stats.hyperplanes);
  r.number("stats", "samples", cfg.stats.samples);
  r.number("stats", "batch", cfg.stats.batch);
  r.number("stats", "trials", cfg.stats.trials);
  r.number("stats", "eta", cfg.stats.eta);
  r.number("stats", "epsilon", cfg.stats.epsilon);
  r.number("stats", "directions", cfg.stats.directions);

  r.reject_unused();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_text_file(path));
}

std::string format_experiment_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [name, entries] : sections(cfg, true)) {
    if (entries.empty()) continue;
    if (!out.empty()) out += "\n";
    out += "[" + name + "]\n";
    for (const auto& [key, value] : entries) out += key + " = " + value + "\n";
  }
  return out;
}

Json canonical_config_json(const ExperimentConfig& cfg) {
  Json out = Json::object();
  for (const auto& [name, entries] : sections(cfg, false)) {
    Json section = Json::object();
    for (const auto& [key, value] : entries) section[key] = value;
    out[name] = section;
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) { return sha256_hex(canonical_config_json(cfg).dump()); }

Instance build_instance(const ExperimentConfig& cfg) {
  try {
    auto pad = [&](const HermitianOperator& h) {
      if (next_power_of_two(h.dim()) == h.dim()) return Instance{h, h.dim()};
      const PaddedOperator padded = pad_to_qubits(h, cfg.padding_factor * h.frobenius_norm());
      return Instance{padded.op, padded.physical_dim};
    };
    switch (cfg.instance) {
      case InstanceKind::toric: return Instance{build_toric(cfg.toric), Index{1} << cfg.toric.qubits()};
      case InstanceKind::planted: return pad(build_planted(cfg.planted));
      case InstanceKind::matrix: return pad(HermitianOperator(read_matrix(cfg.matrix_path)));
    }
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("instance: ") + e.what());
  }
  throw ConfigError("unknown instance kind");
}

QrsiConfig resolve_qrsi(const ExperimentConfig& cfg, const Instance& instance) {
  QrsiConfig q = cfg.qrsi;
  q.rotation.physical_dim = instance.physical_dim;
  q.rotation.padded_dim = instance.h.dim();
  q.rotation.master_seed = cfg.master_seed;
  q.threads = cfg.threads;
  q.target_energy = cfg.target_energy ? *cfg.target_energy : instance.h.eigen().values[0];
  if (q.primitive.seed.kind == SeedKind::given_vector) {
    const ComplexMatrix v = read_matrix(cfg.seed_file);
    if (v.cols() != 1) throw ConfigError("seed_file must hold a single column");
    q.primitive.seed.vector = v.col(0);
  }
  return q;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Instance inst = build_instance(cfg);
  OutputWriter out(cfg);
  ExperimentOutput result;
  switch (cfg.kind) {
    case ExperimentKind::toric_panel: result.summary = cmd_toric_panel(cfg, inst, out); break;
    case ExperimentKind::planted: result.summary = cmd_planted(cfg, inst, out); break;
    case ExperimentKind::sweep: result.summary = cmd_sweep(cfg, inst, out); break;
    case ExperimentKind::eta: result.summary = cmd_eta(cfg, inst, out); break;
    case ExperimentKind::spanning: result.summary = cmd_spanning(cfg, inst, out); break;
    case ExperimentKind::serial: result.summary = cmd_serial(cfg, inst, out); break;
    case ExperimentKind::footpoint: result.summary = cmd_footpoint(cfg, inst, out); break;
  }
  out.finish();
  result.files = out.files();
  return result;
}

std::filesystem::path export_instance(const ExperimentConfig& cfg, const std::filesystem::path& path,
                                      MatrixFormat format) {
  const Instance inst = build_instance(cfg);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  try {
    write_matrix(path, inst.h.matrix(), format);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return path;
}

VerifyResult verify_outputs(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  VerifyResult out;
  auto problem = [&](const std::string& msg) {
    out.ok = false;
    out.problems.push_back(msg);
  };
  const std::string expected = config_hash(cfg);
  Json manifest;
  try {
    manifest = Json::parse(read_text_file(dir / "manifest.json"));
  } catch (const std::exception& e) {
    problem(std::string("manifest.json unreadable: ") + e.what());
    return out;
  }
  if (manifest.value("config_hash", std::string()) != expected) problem("manifest config_hash does not match config");
  for (const auto& entry : manifest["files"]) {
    const std::string name = entry.value("name", std::string());
    std::string content;
    try {
      content = read_text_file(dir / name);
    } catch (const ConfigError&) {
      problem(name + ": missing");
      continue;
    }
    if (sha256_hex(content) != entry.value("sha256", std::string())) problem(name + ": digest mismatch");
    if (name.ends_with(".csv")) {
      if (!content.starts_with("# config_hash=" + expected + "\n")) problem(name + ": config hash mismatch");
    } else if (name.ends_with(".json")) {
      try {
        if (Json::parse(content).value("config_hash", std::string()) != expected) {
          problem(name + ": config hash mismatch");
        }
      } catch (const std::exception&) {
        problem(name + ": not valid JSON");
      }
    }
  }
  return out;
}

}  // namespace qrsi
