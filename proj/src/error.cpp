// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "aht/error.hpp"

namespace aht {

namespace {

std::string join_issues(const std::vector<ConfigError::Issue>& issues) {
  std::string out = "invalid configuration:";
  for (const auto& issue : issues) {
    out += "\n  ";
    out += issue.path.empty() ? std::string("<root>") : issue.path;
    out += ": ";
    out += issue.message;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<Issue> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

ConfigError::ConfigError(std::string path, std::string message)
    : ConfigError(std::vector<Issue>{{std::move(path), std::move(message)}}) {}

}  // namespace aht
