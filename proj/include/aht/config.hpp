// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "aht/model.hpp"
#include "aht/policy.hpp"

namespace aht {

/// One policy entry of an experiment. The cost is supplied per sweep point.
struct PolicySpec {
  PolicyKind kind = PolicyKind::Adhm;
  std::string label;
  double p_th = 0.7;
  double gamma = 0.0;
  BaselineLlrMode baseline_llr_mode = BaselineLlrMode::StationaryMixture;
  BeliefSource belief_source = BeliefSource::PerCell;
  double explore = 0.0;
};

/// Knobs of the `verify` suites.
struct VerifySettings {
  double tol = 1e-6;
  std::uint64_t seed = 7;
  std::size_t kl_pairs = 100;
  std::size_t mixture_instances = 500;
  std::size_t palettes = 200;
  std::size_t oracle_trials = 1000;
  double oracle_neg_log_c = 25.0;
  double oracle_band_lo = 0.8;
  double oracle_band_hi = 1.2;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::size_t cells = 10;
  std::size_t probes = 2;
  ObservationModel model{DistributionSpec::exponential(0.5), DistributionSpec::exponential(10.0), {}, {}};
  std::vector<PolicySpec> policies;
  /// Sweep points as -log c, strictly increasing (c strictly decreasing).
  std::vector<double> neg_log_c;
  std::size_t trials = 10000;
  std::uint64_t base_seed = 1;
  std::uint64_t horizon = 1000000;
  double llr_cap = 50.0;
  VerifySettings verify;

  PolicyConfig policy_config(std::size_t policy_index, double cost) const;
  /// Throws ConfigError listing every violated field.
  void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& config);

/// Editable JSON document behind an ExperimentConfig. Accepts // and /* */
/// comments.
class ConfigDocument {
 public:
  static ConfigDocument from_text(std::string_view text, std::string origin = "<text>");
  static ConfigDocument from_file(const std::string& path);
  static ConfigDocument from_preset(std::string_view name);
  /// An existing file path, else a preset name or alias (a leading
  /// directory and a .json/.jsonc suffix are ignored for the lookup).
  static ConfigDocument resolve(std::string_view path_or_preset);

  /// Apply `key=value` where key is a dotted path (`policies.1.p_th`).
  /// The value is parsed as JSON when possible, else taken as a string.
  void set(std::string_view assignment);
  void set(std::string_view dotted_key, std::string_view value);

  ExperimentConfig parse() const;
  std::string dump(int indent = 2) const { return doc_.dump(indent); }
  const std::string& origin() const noexcept { return origin_; }
  const nlohmann::json& json() const noexcept { return doc_; }

 private:
  ConfigDocument(nlohmann::json doc, std::string origin) : doc_(std::move(doc)), origin_(std::move(origin)) {}

  nlohmann::json doc_;
  std::string origin_;
};

struct PresetInfo {
  std::string_view name;
  std::string_view summary;
  std::string_view text;
};

std::span<const PresetInfo> presets() noexcept;
/// Preset by canonical name or alias; nullptr if unknown.
const PresetInfo* find_preset(std::string_view name) noexcept;

}  // namespace aht
