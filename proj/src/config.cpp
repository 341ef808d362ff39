// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "aht/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "aht/error.hpp"

namespace aht {

namespace {

using nlohmann::json;
using Issues = std::vector<ConfigError::Issue>;

std::string join_path(const std::string& base, std::string_view key) {
  return base.empty() ? std::string(key) : fmt::format("{}.{}", base, key);
}

// Typed field access that records problems instead of throwing, so one
// validation pass reports every bad field.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path, Issues& issues)
      : obj_(obj), path_(std::move(path)), issues_(issues) {
    if (!obj_.is_object()) issues_.push_back({path_, "expected an object"});
  }

  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  ~ObjectReader() {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) issues_.push_back({join_path(path_, key), "unknown key"});
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.is_object() && obj_.contains(key);
  }

  const json* get(const std::string& key) {
    if (!has(key)) return nullptr;
    return &obj_.at(key);
  }

  std::optional<double> number(const std::string& key, bool required) {
    const json* v = get(key);
    if (v == nullptr) {
      if (required) issues_.push_back({join_path(path_, key), "missing required number"});
      return std::nullopt;
    }
    if (!v->is_number()) {
      issues_.push_back({join_path(path_, key), "expected a number"});
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<std::uint64_t> integer(const std::string& key, bool required) {
    const json* v = get(key);
    if (v == nullptr) {
      if (required) issues_.push_back({join_path(path_, key), "missing required integer"});
      return std::nullopt;
    }
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_float()) {
      const double d = v->get<double>();
      if (d >= 0.0 && std::floor(d) == d && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    issues_.push_back({join_path(path_, key), "expected a non-negative integer"});
    return std::nullopt;
  }

  std::optional<std::string> string(const std::string& key, bool required) {
    const json* v = get(key);
    if (v == nullptr) {
      if (required) issues_.push_back({join_path(path_, key), "missing required string"});
      return std::nullopt;
    }
    if (!v->is_string()) {
      issues_.push_back({join_path(path_, key), "expected a string"});
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key, bool required) {
    const json* v = get(key);
    if (v == nullptr) {
      if (required) issues_.push_back({join_path(path_, key), "missing required list of numbers"});
      return std::nullopt;
    }
    if (!v->is_array()) {
      issues_.push_back({join_path(path_, key), "expected a list of numbers"});
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) {
        issues_.push_back({fmt::format("{}.{}", join_path(path_, key), i), "expected a number"});
        return std::nullopt;
      }
      out.push_back((*v)[i].get<double>());
    }
    return out;
  }

  void issue(const std::string& key, std::string message) {
    issues_.push_back({join_path(path_, key), std::move(message)});
  }

  const std::string& path() const noexcept { return path_; }

 private:
  const json& obj_;
  std::string path_;
  Issues& issues_;
  std::set<std::string> seen_;
};

std::optional<DistributionSpec> parse_law(const json& obj, const std::string& path, Issues& issues) {
  ObjectReader r(obj, path, issues);
  const auto family = r.string("family", true);
  if (!family) return std::nullopt;
  try {
    if (*family == "exponential") {
      if (auto rate = r.number("rate", true)) return DistributionSpec::exponential(*rate);
    } else if (*family == "geometric") {
      if (auto success = r.number("success", true)) return DistributionSpec::geometric(*success);
    } else if (*family == "tabulated") {
      if (auto probs = r.numbers("probs", true)) return DistributionSpec::tabulated(*probs);
    } else {
      r.issue("family", fmt::format("unknown family '{}' (expected exponential, geometric or tabulated)", *family));
    }
  } catch (const DomainError& e) {
    issues.push_back({path, e.what()});
  }
  return std::nullopt;
}

json law_to_json(const DistributionSpec& law) {
  switch (law.kind()) {
    case DistributionKind::Exponential:
      return {{"family", "exponential"}, {"rate", law.parameter()}};
    case DistributionKind::Geometric:
      return {{"family", "geometric"}, {"success", law.parameter()}};
    case DistributionKind::Tabulated:
      return {{"family", "tabulated"},
              {"probs", std::vector<double>(law.probabilities().begin(), law.probabilities().end())}};
  }
  return {};
}

std::optional<PolicySpec> parse_policy(const json& obj, const std::string& path, Issues& issues) {
  ObjectReader r(obj, path, issues);
  PolicySpec spec;
  const auto kind = r.string("kind", true);
  if (!kind) return std::nullopt;
  const auto parsed = parse_policy_kind(*kind);
  if (!parsed) {
    r.issue("kind", fmt::format("unknown policy '{}' (expected ADHM, ADHM-P, DGF, Chernoff or ADHM-Oracle)", *kind));
    return std::nullopt;
  }
  spec.kind = *parsed;
  spec.label = r.string("label", false).value_or(std::string(to_string(spec.kind)));
  if (auto v = r.number("p_th", false)) spec.p_th = *v;
  if (auto v = r.number("gamma", false)) spec.gamma = *v;
  if (auto v = r.number("explore", false)) spec.explore = *v;
  if (auto v = r.string("baseline_llr", false)) {
    if (auto mode = parse_baseline_llr_mode(*v)) {
      spec.baseline_llr_mode = *mode;
    } else {
      r.issue("baseline_llr", "expected stationary_mixture or raw_g");
    }
  }
  if (auto v = r.string("belief_source", false)) {
    if (auto src = parse_belief_source(*v)) {
      spec.belief_source = *src;
    } else {
      r.issue("belief_source", "expected top_cell or per_cell");
    }
  }
  if (!(spec.p_th >= 0.0 && spec.p_th <= 1.0)) r.issue("p_th", "must lie in [0,1]");
  if (!(spec.gamma >= 0.0) || !std::isfinite(spec.gamma)) r.issue("gamma", "must be finite and >= 0");
  if (!(spec.explore >= 0.0 && spec.explore <= 1.0)) r.issue("explore", "must lie in [0,1]");
  return spec;
}

void parse_verify(const json& obj, const std::string& path, VerifySettings& out, Issues& issues) {
  ObjectReader r(obj, path, issues);
  if (auto v = r.number("tol", false)) out.tol = *v;
  if (auto v = r.integer("seed", false)) out.seed = *v;
  if (auto v = r.integer("kl_pairs", false)) out.kl_pairs = *v;
  if (auto v = r.integer("mixture_instances", false)) out.mixture_instances = *v;
  if (auto v = r.integer("palettes", false)) out.palettes = *v;
  if (auto v = r.integer("oracle_trials", false)) out.oracle_trials = *v;
  if (auto v = r.number("oracle_neg_log_c", false)) out.oracle_neg_log_c = *v;
  if (auto v = r.number("oracle_band_lo", false)) out.oracle_band_lo = *v;
  if (auto v = r.number("oracle_band_hi", false)) out.oracle_band_hi = *v;
  if (!std::isfinite(out.tol)) r.issue("tol", "must be finite");
  if (!(out.oracle_neg_log_c > 0.0)) r.issue("oracle_neg_log_c", "must be > 0");
}

// Dotted key -> JSON pointer; numeric segments index arrays.
json::json_pointer to_pointer(std::string_view dotted) {
  std::string pointer;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    const std::size_t dot = dotted.find('.', start);
    const std::string_view seg = dotted.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (seg.empty()) throw ConfigError(std::string(dotted), "empty path segment in override key");
    pointer += '/';
    for (char ch : seg) {
      if (ch == '~') {
        pointer += "~0";
      } else if (ch == '/') {
        pointer += "~1";
      } else {
        pointer += ch;
      }
    }
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return json::json_pointer(pointer);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", fmt::format("cannot open config file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

PolicyConfig ExperimentConfig::policy_config(std::size_t policy_index, double cost) const {
  const PolicySpec& spec = policies.at(policy_index);
  PolicyConfig pc;
  pc.kind = spec.kind;
  pc.cells = cells;
  pc.probes = probes;
  pc.cost = cost;
  pc.p_th = spec.p_th;
  pc.gamma = spec.gamma;
  pc.baseline_llr_mode = spec.baseline_llr_mode;
  pc.belief_source = spec.belief_source;
  pc.explore = spec.explore;
  pc.llr_cap = llr_cap;
  return pc;
}

void ExperimentConfig::validate() const {
  Issues issues;
  if (cells < 2) issues.push_back({"cells", "need at least 2 cells (the stopping gap compares the top two)"});
  if (probes < 1 || probes > cells) issues.push_back({"probes", fmt::format("must lie in [1, cells={}]", cells)});
  try {
    model.hmm.validate();
  } catch (const DomainError& e) {
    issues.push_back({"hmm", e.what()});
  }
  if (model.normal.space() != model.abnormal.space()) {
    issues.push_back({"abnormal", "normal and abnormal laws must both be continuous or both be discrete"});
  }
  if (model.oracle) {
    try {
      model.oracle->validate();
    } catch (const DomainError& e) {
      issues.push_back({"world", e.what()});
    }
  }
  if (policies.empty()) issues.push_back({"policies", "need at least one policy"});
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const auto& p = policies[i];
    const std::string path = fmt::format("policies.{}", i);
    if (p.kind == PolicyKind::AdhmOracle && !model.oracle) {
      issues.push_back({path + ".kind", "ADHM-Oracle requires world.mode = oracle"});
    }
    if (!(p.p_th >= 0.0 && p.p_th <= 1.0)) issues.push_back({path + ".p_th", "must lie in [0,1]"});
    if (!(p.gamma >= 0.0)) issues.push_back({path + ".gamma", "must be >= 0"});
    if (!(p.explore >= 0.0 && p.explore <= 1.0)) issues.push_back({path + ".explore", "must lie in [0,1]"});
    for (std::size_t j = 0; j < i; ++j) {
      if (policies[j].label == p.label) issues.push_back({path + ".label", fmt::format("duplicate label '{}'", p.label)});
    }
  }
  if (neg_log_c.empty()) issues.push_back({"neg_log_c", "need at least one cost value"});
  for (std::size_t i = 0; i < neg_log_c.size(); ++i) {
    if (!(neg_log_c[i] > 0.0) || !std::isfinite(neg_log_c[i])) {
      issues.push_back({fmt::format("neg_log_c.{}", i), "must be finite and > 0 (cost strictly inside (0,1))"});
    }
    if (i > 0 && !(neg_log_c[i] > neg_log_c[i - 1])) {
      issues.push_back({fmt::format("neg_log_c.{}", i), "grid must be strictly increasing in -log c"});
    }
  }
  if (trials < 1) issues.push_back({"trials", "must be >= 1"});
  if (horizon < 1) issues.push_back({"horizon", "must be >= 1"});
  if (!(llr_cap > 0.0)) issues.push_back({"llr_cap", "must be > 0"});
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

ExperimentConfig parse_config(const json& doc) {
  Issues issues;
  ExperimentConfig cfg;
  {
    ObjectReader r(doc, "", issues);
    if (auto v = r.string("name", false)) cfg.name = *v;
    if (auto v = r.integer("cells", true)) cfg.cells = *v;
    if (auto v = r.integer("probes", true)) cfg.probes = *v;
    if (const json* v = r.get("normal")) {
      if (auto law = parse_law(*v, "normal", issues)) cfg.model.normal = *law;
    } else {
      r.issue("normal", "missing required law");
    }
    if (const json* v = r.get("abnormal")) {
      if (auto law = parse_law(*v, "abnormal", issues)) cfg.model.abnormal = *law;
    } else {
      r.issue("abnormal", "missing required law");
    }
    if (const json* v = r.get("hmm")) {
      ObjectReader h(*v, "hmm", issues);
      if (auto a = h.number("alpha", true)) cfg.model.hmm.alpha = *a;
      if (auto b = h.number("beta", true)) cfg.model.hmm.beta = *b;
      if (!(cfg.model.hmm.alpha > 0.0 && cfg.model.hmm.alpha < 1.0)) h.issue("alpha", "must lie in (0,1)");
      if (!(cfg.model.hmm.beta > 0.0 && cfg.model.hmm.beta < 1.0)) h.issue("beta", "must lie in (0,1)");
    } else {
      r.issue("hmm", "missing required object");
    }
    if (const json* v = r.get("world")) {
      ObjectReader w(*v, "world", issues);
      const std::string mode = w.string("mode", false).value_or("hmm");
      if (mode == "oracle") {
        OraclePalette palette;
        if (auto lv = w.numbers("levels", true)) palette.levels = *lv;
        if (auto wt = w.numbers("weights", true)) palette.weights = *wt;
        try {
          palette.validate();
          cfg.model.oracle = palette;
        } catch (const DomainError& e) {
          issues.push_back({"world", e.what()});
        }
      } else if (mode != "hmm") {
        w.issue("mode", "expected hmm or oracle");
      } else if (w.has("levels") || w.has("weights")) {
        w.issue("mode", "levels/weights are only meaningful with mode = oracle");
      }
    }
    if (const json* v = r.get("policies")) {
      if (!v->is_array()) {
        r.issue("policies", "expected a list");
      } else {
        for (std::size_t i = 0; i < v->size(); ++i) {
          if (auto p = parse_policy((*v)[i], fmt::format("policies.{}", i), issues)) cfg.policies.push_back(*p);
        }
      }
    } else {
      r.issue("policies", "missing required list");
    }
    const auto grid = r.numbers("neg_log_c", false);
    const auto costs = r.numbers("c_grid", false);
    if (grid && costs) {
      r.issue("c_grid", "give either neg_log_c or c_grid, not both");
    } else if (grid) {
      cfg.neg_log_c = *grid;
    } else if (costs) {
      for (std::size_t i = 0; i < costs->size(); ++i) {
        const double c = (*costs)[i];
        if (!(c > 0.0 && c < 1.0)) {
          r.issue(fmt::format("c_grid.{}", i), "cost must lie in (0,1)");
        }
        cfg.neg_log_c.push_back(-std::log(c));
      }
    } else {
      r.issue("neg_log_c", "missing cost grid (neg_log_c or c_grid)");
    }
    if (auto v = r.integer("trials", false)) cfg.trials = *v;
    if (auto v = r.integer("base_seed", false)) cfg.base_seed = *v;
    if (auto v = r.integer("horizon", false)) cfg.horizon = *v;
    if (auto v = r.number("llr_cap", false)) cfg.llr_cap = *v;
    if (const json* v = r.get("verify")) parse_verify(*v, "verify", cfg.verify, issues);
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  cfg.validate();
  return cfg;
}

json to_json(const ExperimentConfig& config) {
  json doc;
  doc["name"] = config.name;
  doc["cells"] = config.cells;
  doc["probes"] = config.probes;
  doc["normal"] = law_to_json(config.model.normal);
  doc["abnormal"] = law_to_json(config.model.abnormal);
  doc["hmm"] = {{"alpha", config.model.hmm.alpha}, {"beta", config.model.hmm.beta}};
  if (config.model.oracle) {
    doc["world"] = {{"mode", "oracle"}, {"levels", config.model.oracle->levels}, {"weights", config.model.oracle->weights}};
  } else {
    doc["world"] = {{"mode", "hmm"}};
  }
  json policies = json::array();
  for (const auto& p : config.policies) {
    json entry = {{"kind", to_string(p.kind)}, {"label", p.label}};
    if (p.kind == PolicyKind::AdhmP) {
      entry["p_th"] = p.p_th;
      entry["gamma"] = p.gamma;
    }
    if (p.kind == PolicyKind::Dgf || p.kind == PolicyKind::Chernoff) {
      entry["baseline_llr"] = to_string(p.baseline_llr_mode);
    }
    if (p.kind == PolicyKind::Chernoff) entry["explore"] = p.explore;
    if (p.kind == PolicyKind::Adhm || p.kind == PolicyKind::AdhmP) entry["belief_source"] = to_string(p.belief_source);
    policies.push_back(entry);
  }
  doc["policies"] = policies;
  doc["neg_log_c"] = config.neg_log_c;
  doc["trials"] = config.trials;
  doc["base_seed"] = config.base_seed;
  doc["horizon"] = config.horizon;
  doc["llr_cap"] = config.llr_cap;
  const auto& v = config.verify;
  doc["verify"] = {{"tol", v.tol},
                   {"seed", v.seed},
                   {"kl_pairs", v.kl_pairs},
                   {"mixture_instances", v.mixture_instances},
                   {"palettes", v.palettes},
                   {"oracle_trials", v.oracle_trials},
                   {"oracle_neg_log_c", v.oracle_neg_log_c},
                   {"oracle_band_lo", v.oracle_band_lo},
                   {"oracle_band_hi", v.oracle_band_hi}};
  return doc;
}

ConfigDocument ConfigDocument::from_text(std::string_view text, std::string origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(origin, fmt::format("malformed config: {}", e.what()));
  }
  return ConfigDocument(std::move(doc), std::move(origin));
}

ConfigDocument ConfigDocument::from_file(const std::string& path) {
  return from_text(read_file(path), path);
}

ConfigDocument ConfigDocument::from_preset(std::string_view name) {
  const PresetInfo* preset = find_preset(name);
  if (preset == nullptr) throw ConfigError("config", fmt::format("unknown preset '{}'", name));
  return from_text(preset->text, fmt::format("preset:{}", preset->name));
}

ConfigDocument ConfigDocument::resolve(std::string_view path_or_preset) {
  const std::filesystem::path path{std::string(path_or_preset)};
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec)) return from_file(path.string());
  std::string stem = path.filename().string();
  for (std::string_view ext : {".jsonc", ".json"}) {
    if (stem.size() > ext.size() && stem.ends_with(ext)) stem.resize(stem.size() - ext.size());
  }
  if (find_preset(stem) != nullptr) return from_preset(stem);
  throw ConfigError("config", fmt::format("config '{}' is neither a readable file nor a known preset",
                                          std::string(path_or_preset)));
}

void ConfigDocument::set(std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(std::string(assignment), "override must have the form key=value");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void ConfigDocument::set(std::string_view dotted_key, std::string_view value) {
  nlohmann::json parsed = nlohmann::json::parse(value, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) parsed = std::string(value);
  try {
    doc_[to_pointer(dotted_key)] = parsed;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(dotted_key), fmt::format("cannot apply override: {}", e.what()));
  }
}

ExperimentConfig ConfigDocument::parse() const { return parse_config(doc_); }

}  // namespace aht
