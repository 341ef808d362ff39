// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "aht/config.hpp"

namespace aht {

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::size_t failed = 0;
  /// Largest violation seen (suite-specific units); see `summary`.
  double worst = 0.0;
  std::string summary;
  /// Failing instances, serialized so they can be replayed.
  std::vector<nlohmann::json> failures;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// kl-closed-form, mixture-kl, theorem2, belief, oracle-delay.
std::span<const std::string_view> verify_suite_names() noexcept;

/// Runs the selected suites (all when `only` is empty) with the knobs in
/// config.verify. The f, g, M and K of the config are checked alongside the
/// randomized instances. Unknown suite names raise ConfigError.
VerifyReport run_verify(const ExperimentConfig& config, std::span<const std::string> only = {});

}  // namespace aht
