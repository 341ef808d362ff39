// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aht/model.hpp"
#include "aht/rng.hpp"
#include "aht/world.hpp"

namespace aht {

enum class PolicyKind { Adhm, AdhmP, Dgf, Chernoff, AdhmOracle };

/// Anomalous law assumed by the i.i.d. baselines: the stationary mixture
/// pi0 * f + (1 - pi0) * g, or g itself.
enum class BaselineLlrMode { StationaryMixture, RawG };

/// Which observations drive the HMM belief. PerCell: every cell filters its
/// own belief under the hypothesis that it is the target, and its LLRs use
/// that belief. TopCell: one shared belief fed by the top-ranked probed cell.
enum class BeliefSource { TopCell, PerCell };

std::string_view to_string(PolicyKind kind) noexcept;
std::optional<PolicyKind> parse_policy_kind(std::string_view text) noexcept;
std::string_view to_string(BaselineLlrMode mode) noexcept;
std::optional<BaselineLlrMode> parse_baseline_llr_mode(std::string_view text) noexcept;
std::string_view to_string(BeliefSource source) noexcept;
std::optional<BeliefSource> parse_belief_source(std::string_view text) noexcept;

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Adhm;
  std::size_t cells = 2;
  std::size_t probes = 1;
  /// Cost per observation; the stopping threshold is -log(cost).
  double cost = 0.01;
  /// ADHM-P: sample when 1 - P0 exceeds this.
  double p_th = 0.7;
  /// ADHM-P: force sampling once delay_counter * gamma > cost.
  double gamma = 0.0;
  BaselineLlrMode baseline_llr_mode = BaselineLlrMode::StationaryMixture;
  BeliefSource belief_source = BeliefSource::PerCell;
  /// Chernoff with one probe: probability of probing a non-leader.
  double explore = 0.0;
  /// Per-sample |LLR| cap.
  double llr_cap = 50.0;

  /// Throws DomainError on any out-of-range field.
  void validate() const;
  double threshold() const { return -std::log(cost); }
};

struct StepDecision {
  enum class Action { Probe, Skip };

  Action action = Action::Probe;
  /// Probe set in rank order (leader first). Empty for Skip and once stopped.
  std::vector<std::size_t> probes;
  bool stopped = false;
  /// Declared anomalous cell; present iff stopped.
  std::optional<std::size_t> declared;
};

struct PolicyState {
  std::vector<double> sum_llr;
  /// Shared belief (TopCell) or the leader's belief (PerCell).
  double belief_p0 = 1.0;
  /// BeliefSource::PerCell only.
  std::vector<double> cell_belief;
  /// 1-based time index of the step awaiting observations.
  std::uint64_t n = 1;
  std::uint64_t delay_counter = 0;
  std::uint64_t samples = 0;
  std::uint64_t idle = 0;
  std::uint64_t clamp_events = 0;
  /// Chernoff baseline only.
  SplitMix64 rng;
  StepDecision pending;
};

struct LlrValue {
  double value;
  bool clamped;
};

/// log(mixture_density(r, f, g, y) / f(y)), clamped to [-cap, cap]. An
/// infinite ratio (f(y) = 0 < mixture, or the reverse) is clamped and
/// flagged. Throws DomainError when both densities vanish.
LlrValue llr(const DistributionSpec& f, const DistributionSpec& g, double r, double y, double cap = 50.0);

/// Indices of the k largest entries in rank order; ties go to the lower
/// index.
std::vector<std::size_t> adhm_select(std::span<const double> sum_llr, std::size_t k);
/// Argmax with lowest-index tie break.
std::size_t leading_cell(std::span<const double> sum_llr);
/// S_(1) - S_(2); needs at least two cells.
double top_gap(std::span<const double> sum_llr);

/// Forward recursion of the two-state chain after observing y:
///   [p0 (1-alpha) f(y) + (1-p0) beta g(y)] / [p0 f(y) + (1-p0) g(y)]
/// Throws DomainError when the normalizer vanishes.
double belief_update_observed(const HmmParams& params, double p0, const DistributionSpec& f,
                              const DistributionSpec& g, double y);
/// p0 (1 - alpha) + (1 - p0) beta
double belief_update_transition_only(const HmmParams& params, double p0);

/// ADHM-P scheduling rule for the step awaiting a decision.
bool adhm_p_should_sample(const PolicyState& state, const PolicyConfig& config);

/// Argmax plus probes-1 distinct others drawn uniformly; with one probe the
/// leader is replaced by a uniform non-leader with probability `explore`.
std::vector<std::size_t> chernoff_select(std::span<const double> sum_llr, std::size_t k, double explore,
                                         SplitMix64& rng);

/// Fresh state with S = 0 and the stationary prior.
PolicyState initial_state(const PolicyConfig& config, const ObservationModel& model, std::uint64_t seed);
/// Decision for time 1, before any observation.
StepDecision initial_decision(PolicyState& state, const PolicyConfig& config, const ObservationModel& model);

// The step functions consume the observations for state.pending, apply the
// stopping rule and, if the search continues, store and return the next
// action. Observations that do not match the pending probe set raise
// ContractViolation.
StepDecision adhm_step(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                       std::span<const Observation> observations);
/// `observations` must be empty when the pending action is Skip.
StepDecision adhm_p_step(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                         std::span<const Observation> observations);
StepDecision dgf_step(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                      std::span<const Observation> observations);
StepDecision chernoff_step(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                           std::span<const Observation> observations);
/// LLRs use the revealed palette level instead of a filtered belief.
StepDecision adhm_oracle_step(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                              std::span<const Observation> observations, std::size_t revealed_d);

/// Owns one policy instance for one trial and dispatches on its kind.
class Policy {
 public:
  Policy(PolicyConfig config, const ObservationModel& model, std::uint64_t seed);

  const StepDecision& start();
  /// `revealed_d` is required for AdhmOracle and ignored otherwise.
  const StepDecision& step(std::span<const Observation> observations,
                           std::optional<std::size_t> revealed_d = std::nullopt);

  const PolicyConfig& config() const noexcept { return config_; }
  const PolicyState& state() const noexcept { return state_; }
  const StepDecision& last_decision() const noexcept { return decision_; }

 private:
  PolicyConfig config_;
  const ObservationModel* model_;
  PolicyState state_;
  StepDecision decision_;
};

}  // namespace aht
