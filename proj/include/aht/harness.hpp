// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aht/config.hpp"

namespace aht {

struct TrialOutcome {
  std::size_t policy_index = 0;
  double cost = 0.0;
  /// Stopping time in time steps, counting skipped steps.
  std::uint64_t tau = 0;
  std::size_t declared = 0;
  std::size_t anomalous = 0;
  bool correct = false;
  /// Steps on which the policy sampled.
  std::uint64_t samples_taken = 0;
  std::uint64_t idle_steps = 0;
  /// Horizon reached before the stopping rule fired; `declared` is the
  /// leader at the horizon.
  bool censored = false;
  std::uint64_t seed = 0;
  std::uint64_t clamp_events = 0;

  bool operator==(const TrialOutcome&) const = default;
};

/// One full search: uniform anomalous cell, world and policy both keyed by
/// `seed`. Deterministic in (config, policy_index, cost, seed).
TrialOutcome run_trial(const ExperimentConfig& config, std::size_t policy_index, double cost, std::uint64_t seed);

/// Seed of one trial in a sweep; any trial can be replayed from it. It does
/// not depend on the policy or the cost, so every policy and every cost
/// point faces the same worlds (common random numbers).
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial_index);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Aggregated metrics of one (policy, cost) cell of a sweep.
struct SweepRow {
  std::string policy;
  std::size_t policy_index = 0;
  double cost = 0.0;
  double neg_log_c = 0.0;
  std::size_t trials = 0;
  double avg_delay = 0.0;
  Interval delay_ci;
  double error_rate = 0.0;
  Interval error_ci;
  /// error_rate + cost * avg_delay
  double bayes_risk = 0.0;
  /// t-interval of the per-trial loss 1{wrong} + cost * tau.
  Interval risk_ci;
  double avg_samples = 0.0;
  double avg_idle = 0.0;
  /// error_rate + cost * avg_samples + gamma * avg_idle
  double sampling_risk = 0.0;
  double censored_frac = 0.0;
  std::uint64_t clamp_events = 0;
  std::uint64_t base_seed = 0;
};

/// error_rate + cost * mean(tau). Throws ContractViolation on empty input.
double aggregate_bayes_risk(std::span<const TrialOutcome> outcomes, double cost);

/// Means with 95% intervals: Wilson for the error rate, Student t for the
/// delay and the per-trial loss.
SweepRow aggregate(std::span<const TrialOutcome> outcomes, double cost, double gamma);

/// Wilson score interval at 95%.
Interval wilson_interval(std::size_t successes, std::size_t trials);

struct SweepOptions {
  /// 0 selects AHT_WORKERS, then the hardware concurrency.
  unsigned workers = 0;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct SweepResult {
  std::string name;
  std::vector<SweepRow> rows;
};

/// Runs every (policy, cost) pair; rows are ordered policy-major. Results
/// do not depend on the worker count.
SweepResult run_sweep(const ExperimentConfig& config, const SweepOptions& options = {});

unsigned resolve_workers(unsigned requested);

inline constexpr std::string_view kCsvHeader =
    "policy,c,neg_log_c,trials,avg_delay,delay_ci_lo,delay_ci_hi,error_rate,err_ci_lo,err_ci_hi,bayes_risk,"
    "avg_samples,avg_idle,censored_frac,base_seed";

std::string to_csv(const SweepResult& result);
void write_csv(const SweepResult& result, const std::string& path);
/// Reads a sweep CSV; fields outside the schema stay zero. Throws IoError
/// naming the first missing column.
SweepResult parse_csv(std::string_view text, std::string origin = "<csv>");
SweepResult read_csv(const std::string& path);

}  // namespace aht
