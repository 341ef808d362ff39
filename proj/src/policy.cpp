// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "aht/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "aht/error.hpp"

namespace aht {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

// Observations must cover the pending probe set exactly (any order).
void check_matches_pending(const PolicyState& state, std::span<const Observation> observations) {
  const auto& pending = state.pending;
  if (pending.stopped) throw ContractViolation("policy already stopped");
  if (pending.action == StepDecision::Action::Skip) {
    if (!observations.empty()) throw ContractViolation("observations supplied for a skipped step");
    return;
  }
  bool ok = observations.size() == pending.probes.size();
  for (std::size_t i = 0; ok && i < observations.size(); ++i) {
    ok = std::find(pending.probes.begin(), pending.probes.end(), observations[i].cell) != pending.probes.end();
    for (std::size_t j = 0; ok && j < i; ++j) ok = observations[j].cell != observations[i].cell;
  }
  if (!ok) {
    throw ContractViolation(
        fmt::format("observations do not match the selected probe set of size {}", pending.probes.size()));
  }
}

const Observation& observation_of(std::span<const Observation> observations, std::size_t cell) {
  for (const auto& o : observations) {
    if (o.cell == cell) return o;
  }
  throw ContractViolation(fmt::format("no observation for cell {}", cell));
}

void accumulate(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                std::span<const Observation> observations, auto&& level_for_cell) {
  for (const auto& o : observations) {
    const LlrValue l = llr(model.normal, model.abnormal, level_for_cell(o.cell), o.value, config.llr_cap);
    state.sum_llr[o.cell] += l.value;
    if (l.clamped) ++state.clamp_events;
  }
  ++state.samples;
  state.delay_counter = 0;
}

// Stopping rule; returns true and fills state.pending when the search ends.
bool try_stop(PolicyState& state, const PolicyConfig& config) {
  if (top_gap(state.sum_llr) >= config.threshold()) {
    state.pending = StepDecision{StepDecision::Action::Probe, {}, true, leading_cell(state.sum_llr)};
    return true;
  }
  return false;
}

void advance_belief_observed(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                             std::span<const Observation> observations) {
  if (config.belief_source == BeliefSource::TopCell) {
    // The leader at selection time heads the probe set.
    const double y = observation_of(observations, state.pending.probes.front()).value;
    state.belief_p0 = belief_update_observed(model.hmm, state.belief_p0, model.normal, model.abnormal, y);
    return;
  }
  for (std::size_t m = 0; m < state.cell_belief.size(); ++m) {
    const auto it = std::find_if(observations.begin(), observations.end(),
                                 [&](const Observation& o) { return o.cell == m; });
    state.cell_belief[m] =
        it == observations.end()
            ? belief_update_transition_only(model.hmm, state.cell_belief[m])
            : belief_update_observed(model.hmm, state.cell_belief[m], model.normal, model.abnormal, it->value);
  }
  state.belief_p0 = state.cell_belief[leading_cell(state.sum_llr)];
}

void advance_belief_transition(PolicyState& state, const ObservationModel& model) {
  state.belief_p0 = belief_update_transition_only(model.hmm, state.belief_p0);
  for (double& b : state.cell_belief) b = belief_update_transition_only(model.hmm, b);
}

double belief_for(const PolicyState& state, const PolicyConfig& config, std::size_t cell) {
  return config.belief_source == BeliefSource::PerCell ? state.cell_belief[cell] : state.belief_p0;
}

double baseline_level(const PolicyConfig& config, const ObservationModel& model) {
  return config.baseline_llr_mode == BaselineLlrMode::RawG ? 0.0 : model.marginal_p0();
}

StepDecision probe(PolicyState& state, std::vector<std::size_t> cells) {
  state.pending = StepDecision{StepDecision::Action::Probe, std::move(cells), false, std::nullopt};
  return state.pending;
}

// Shared skeleton of the always-sampling policies.
template <typename LevelFn, typename SelectFn>
StepDecision sampling_step(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                           std::span<const Observation> observations, LevelFn&& level, SelectFn&& select) {
  check_matches_pending(state, observations);
  if (state.pending.action == StepDecision::Action::Skip) {
    throw ContractViolation("this policy never skips");
  }
  accumulate(state, config, model, observations, level);
  if (try_stop(state, config)) return state.pending;
  ++state.n;
  return probe(state, select());
}

}  // namespace

std::string_view to_string(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::Adhm:
      return "ADHM";
    case PolicyKind::AdhmP:
      return "ADHM-P";
    case PolicyKind::Dgf:
      return "DGF";
    case PolicyKind::Chernoff:
      return "Chernoff";
    case PolicyKind::AdhmOracle:
      return "ADHM-Oracle";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view text) noexcept {
  for (auto k : {PolicyKind::Adhm, PolicyKind::AdhmP, PolicyKind::Dgf, PolicyKind::Chernoff, PolicyKind::AdhmOracle}) {
    if (text == to_string(k)) return k;
  }
  if (text == "ADHM_P") return PolicyKind::AdhmP;
  if (text == "ADHM_Oracle") return PolicyKind::AdhmOracle;
  if (text == "CH") return PolicyKind::Chernoff;
  return std::nullopt;
}

std::string_view to_string(BaselineLlrMode mode) noexcept {
  return mode == BaselineLlrMode::RawG ? "raw_g" : "stationary_mixture";
}

std::optional<BaselineLlrMode> parse_baseline_llr_mode(std::string_view text) noexcept {
  if (text == "raw_g") return BaselineLlrMode::RawG;
  if (text == "stationary_mixture") return BaselineLlrMode::StationaryMixture;
  return std::nullopt;
}

std::string_view to_string(BeliefSource source) noexcept {
  return source == BeliefSource::PerCell ? "per_cell" : "top_cell";
}

std::optional<BeliefSource> parse_belief_source(std::string_view text) noexcept {
  if (text == "per_cell") return BeliefSource::PerCell;
  if (text == "top_cell") return BeliefSource::TopCell;
  return std::nullopt;
}

void PolicyConfig::validate() const {
  if (cells < 2) throw DomainError(fmt::format("need at least 2 cells, got {}", cells));
  if (probes < 1 || probes > cells) {
    throw DomainError(fmt::format("probes per step must lie in [1, {}], got {}", cells, probes));
  }
  if (!(cost > 0.0 && cost < 1.0)) throw DomainError(fmt::format("cost must lie in (0,1), got {}", cost));
  if (!(p_th >= 0.0 && p_th <= 1.0)) throw DomainError(fmt::format("p_th must lie in [0,1], got {}", p_th));
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError(fmt::format("gamma must be >= 0, got {}", gamma));
  if (!(explore >= 0.0 && explore <= 1.0)) {
    throw DomainError(fmt::format("explore must lie in [0,1], got {}", explore));
  }
  if (!(llr_cap > 0.0)) throw DomainError(fmt::format("llr_cap must be > 0, got {}", llr_cap));
}

LlrValue llr(const DistributionSpec& f, const DistributionSpec& g, double r, double y, double cap) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError(fmt::format("belief must lie in [0,1], got {}", r));
  const double lf = f.log_density(y);
  if (r == 1.0) {
    if (lf == -kInf) throw DomainError(fmt::format("observation {} has zero density under both laws", y));
    return {0.0, false};
  }
  const double lg = g.log_density(y);
  const double lmix = log_add(r > 0.0 ? std::log(r) + lf : -kInf, std::log1p(-r) + lg);
  if (lmix == -kInf && lf == -kInf) {
    throw DomainError(fmt::format("observation {} has zero density under both laws", y));
  }
  const double value = lmix - lf;
  if (std::abs(value) > cap) return {std::copysign(cap, value), true};
  return {value, false};
}

std::vector<std::size_t> adhm_select(std::span<const double> sum_llr, std::size_t k) {
  if (k > sum_llr.size()) throw ContractViolation("cannot select more cells than exist");
  std::vector<std::size_t> order(sum_llr.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return sum_llr[a] > sum_llr[b] || (sum_llr[a] == sum_llr[b] && a < b);
                    });
  order.resize(k);
  return order;
}

std::size_t leading_cell(std::span<const double> sum_llr) {
  std::size_t best = 0;
  for (std::size_t m = 1; m < sum_llr.size(); ++m) {
    if (sum_llr[m] > sum_llr[best]) best = m;
  }
  return best;
}

double top_gap(std::span<const double> sum_llr) {
  if (sum_llr.size() < 2) throw ContractViolation("gap statistic needs at least two cells");
  double first = -kInf;
  double second = -kInf;
  for (double s : sum_llr) {
    if (s > first) {
      second = first;
      first = s;
    } else if (s > second) {
      second = s;
    }
  }
  return first - second;
}

double belief_update_observed(const HmmParams& params, double p0, const DistributionSpec& f,
                              const DistributionSpec& g, double y) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw DomainError(fmt::format("belief must lie in [0,1], got {}", p0));
  const double fy = f.density(y);
  const double gy = g.density(y);
  double num = p0 * (1.0 - params.alpha) * fy + (1.0 - p0) * params.beta * gy;
  double den = p0 * fy + (1.0 - p0) * gy;
  if (!(den > 0.0) || !std::isnormal(den)) {
    // Densities underflowed or vanished; redo the ratio relative to the
    // larger log density.
    const double lf = f.log_density(y);
    const double lg = g.log_density(y);
    if (lf == -kInf && lg == -kInf) {
      throw DomainError(fmt::format("observation {} has zero density under both laws", y));
    }
    const double hi = std::max(lf, lg);
    const double rf = std::exp(lf - hi);
    const double rg = std::exp(lg - hi);
    num = p0 * (1.0 - params.alpha) * rf + (1.0 - p0) * params.beta * rg;
    den = p0 * rf + (1.0 - p0) * rg;
    if (!(den > 0.0)) throw DomainError(fmt::format("belief normalizer vanished at observation {}", y));
  }
  return std::clamp(num / den, 0.0, 1.0);
}

double belief_update_transition_only(const HmmParams& params, double p0) {
  return std::clamp(p0 * (1.0 - params.alpha) + (1.0 - p0) * params.beta, 0.0, 1.0);
}

bool adhm_p_should_sample(const PolicyState& state, const PolicyConfig& config) {
  const double p0 = config.belief_source == BeliefSource::PerCell
                        ? state.cell_belief[leading_cell(state.sum_llr)]
                        : state.belief_p0;
  return (1.0 - p0) > config.p_th || static_cast<double>(state.delay_counter) * config.gamma > config.cost;
}

std::vector<std::size_t> chernoff_select(std::span<const double> sum_llr, std::size_t k, double explore,
                                         SplitMix64& rng) {
  const std::size_t cells = sum_llr.size();
  const std::size_t leader = leading_cell(sum_llr);
  std::vector<std::size_t> others;
  others.reserve(cells - 1);
  for (std::size_t m = 0; m < cells; ++m) {
    if (m != leader) others.push_back(m);
  }
  if (k == 1) {
    if (explore > 0.0 && !others.empty() && bernoulli(rng, explore)) {
      return {others[uniform_index(rng, others.size())]};
    }
    return {leader};
  }
  // Partial Fisher-Yates over the non-leaders.
  std::vector<std::size_t> out{leader};
  for (std::size_t i = 0; i + 1 < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, others.size() - i));
    std::swap(others[i], others[j]);
    out.push_back(others[i]);
  }
  return out;
}

PolicyState initial_state(const PolicyConfig& config, const ObservationModel& model, std::uint64_t seed) {
  config.validate();
  PolicyState state;
  state.sum_llr.assign(config.cells, 0.0);
  state.belief_p0 = stationary_p0(model.hmm);
  if (config.belief_source == BeliefSource::PerCell) state.cell_belief.assign(config.cells, state.belief_p0);
  state.rng = SplitMix64(derive_seed({seed, 0x43484552ULL}));
  return state;
}

StepDecision initial_decision(PolicyState& state, const PolicyConfig& config, const ObservationModel& model) {
  (void)model;
  switch (config.kind) {
    case PolicyKind::Chernoff:
      return probe(state, chernoff_select(state.sum_llr, config.probes, config.explore, state.rng));
    case PolicyKind::AdhmP:
      if (!adhm_p_should_sample(state, config)) {
        state.pending = StepDecision{StepDecision::Action::Skip, {}, false, std::nullopt};
        return state.pending;
      }
      [[fallthrough]];
    default:
      return probe(state, adhm_select(state.sum_llr, config.probes));
  }
}

StepDecision adhm_step(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                       std::span<const Observation> observations) {
  check_matches_pending(state, observations);
  if (state.pending.action == StepDecision::Action::Skip) throw ContractViolation("ADHM never skips");
  accumulate(state, config, model, observations, [&](std::size_t m) { return belief_for(state, config, m); });
  if (try_stop(state, config)) return state.pending;
  advance_belief_observed(state, config, model, observations);
  ++state.n;
  return probe(state, adhm_select(state.sum_llr, config.probes));
}

StepDecision adhm_p_step(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                         std::span<const Observation> observations) {
  check_matches_pending(state, observations);
  const bool sampled = state.pending.action == StepDecision::Action::Probe;
  if (sampled) {
    accumulate(state, config, model, observations, [&](std::size_t m) { return belief_for(state, config, m); });
  } else {
    ++state.delay_counter;
    ++state.idle;
  }
  // The gap is re-tested on skipped steps too.
  if (try_stop(state, config)) return state.pending;
  if (sampled) {
    advance_belief_observed(state, config, model, observations);
  } else {
    advance_belief_transition(state, model);
  }
  ++state.n;
  if (!adhm_p_should_sample(state, config)) {
    state.pending = StepDecision{StepDecision::Action::Skip, {}, false, std::nullopt};
    return state.pending;
  }
  return probe(state, adhm_select(state.sum_llr, config.probes));
}

StepDecision dgf_step(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                      std::span<const Observation> observations) {
  const double level = baseline_level(config, model);
  return sampling_step(
      state, config, model, observations, [&](std::size_t) { return level; },
      [&] { return adhm_select(state.sum_llr, config.probes); });
}

StepDecision chernoff_step(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                           std::span<const Observation> observations) {
  const double level = baseline_level(config, model);
  return sampling_step(
      state, config, model, observations, [&](std::size_t) { return level; },
      [&] { return chernoff_select(state.sum_llr, config.probes, config.explore, state.rng); });
}

StepDecision adhm_oracle_step(PolicyState& state, const PolicyConfig& config, const ObservationModel& model,
                              std::span<const Observation> observations, std::size_t revealed_d) {
  if (!model.oracle) throw ContractViolation("oracle policy needs an oracle palette");
  if (revealed_d >= model.oracle->size()) {
    throw ContractViolation(
        fmt::format("revealed component {} out of range for a palette of size {}", revealed_d, model.oracle->size()));
  }
  const double level = model.oracle->levels[revealed_d];
  return sampling_step(
      state, config, model, observations, [&](std::size_t) { return level; },
      [&] { return adhm_select(state.sum_llr, config.probes); });
}

Policy::Policy(PolicyConfig config, const ObservationModel& model, std::uint64_t seed)
    : config_(config), model_(&model), state_(initial_state(config_, model, seed)) {
  if (config_.kind == PolicyKind::AdhmOracle && !model.oracle) {
    throw ContractViolation("ADHM-Oracle requires an oracle-mode world");
  }
}

const StepDecision& Policy::start() {
  decision_ = initial_decision(state_, config_, *model_);
  return decision_;
}

const StepDecision& Policy::step(std::span<const Observation> observations, std::optional<std::size_t> revealed_d) {
  switch (config_.kind) {
    case PolicyKind::Adhm:
      decision_ = adhm_step(state_, config_, *model_, observations);
      break;
    case PolicyKind::AdhmP:
      decision_ = adhm_p_step(state_, config_, *model_, observations);
      break;
    case PolicyKind::Dgf:
      decision_ = dgf_step(state_, config_, *model_, observations);
      break;
    case PolicyKind::Chernoff:
      decision_ = chernoff_step(state_, config_, *model_, observations);
      break;
    case PolicyKind::AdhmOracle:
      if (!revealed_d) throw ContractViolation("ADHM-Oracle step needs the revealed palette index");
      decision_ = adhm_oracle_step(state_, config_, *model_, observations, *revealed_d);
      break;
  }
  return decision_;
}

}  // namespace aht
