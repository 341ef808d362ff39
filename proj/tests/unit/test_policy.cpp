// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "doctest.h"

#include "aht/config.hpp"
#include "aht/error.hpp"
#include "aht/harness.hpp"
#include "aht/policy.hpp"
#include "stats.hpp"

using namespace aht;

namespace {

const DistributionSpec kF = DistributionSpec::exponential(0.5);
const DistributionSpec kG = DistributionSpec::exponential(10.0);

ObservationModel exp_model(double alpha, double beta) { return {kF, kG, {alpha, beta}, {}}; }

PolicyConfig policy(PolicyKind kind, std::size_t cells, std::size_t probes, double cost) {
  PolicyConfig pc;
  pc.kind = kind;
  pc.cells = cells;
  pc.probes = probes;
  pc.cost = cost;
  return pc;
}

PolicySpec spec(PolicyKind kind, std::string label) {
  PolicySpec s;
  s.kind = kind;
  s.label = std::move(label);
  return s;
}

ExperimentConfig experiment(std::size_t cells, std::size_t probes, HmmParams hmm) {
  ExperimentConfig cfg;
  cfg.cells = cells;
  cfg.probes = probes;
  cfg.model = {kF, kG, hmm, {}};
  cfg.neg_log_c = {4.0};
  return cfg;
}

}  // namespace

TEST_CASE("llr degenerate cases") {
  for (double y : {0.01, 0.5, 3.0}) {
    CHECK(llr(kF, kG, 1.0, y).value == 0.0);
    for (double r : {0.0, 0.3, 0.9}) CHECK(llr(kF, kF, r, y).value == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("llr worked example") {
  const long double num = 0.5L * 0.5L * std::exp(-0.05L) + 0.5L * 10.0L * std::exp(-1.0L);
  const long double den = 0.5L * std::exp(-0.05L);
  const double oracle = static_cast<double>(std::log(num / den));
  const LlrValue v = llr(kF, kG, 0.5, 0.1);
  CHECK_FALSE(v.clamped);
  CHECK(std::abs(v.value - oracle) < 1e-13);
  CHECK(v.value == doctest::Approx(1.4741).epsilon(5e-5));
}

TEST_CASE("llr clamps and flags extreme ratios") {
  const LlrValue v = llr(kF, kG, 0.0, 20.0, 50.0);
  CHECK(v.clamped);
  CHECK(v.value == -50.0);
  CHECK_THROWS_AS(llr(kF, kG, 1.5, 0.1), DomainError);
}

TEST_CASE("top-K selection") {
  const std::vector<double> s{3.2, -1.0, 5.0};
  CHECK(adhm_select(s, 2) == std::vector<std::size_t>{2, 0});
  const std::vector<double> tied(4, 0.7);
  CHECK(adhm_select(tied, 2) == std::vector<std::size_t>{0, 1});
  const std::vector<double> ten(10, 0.0);
  CHECK(adhm_select(ten, 10).size() == 10);
  CHECK(leading_cell(tied) == 0);
  CHECK(top_gap(s) == doctest::Approx(1.8));
  CHECK(top_gap(tied) == 0.0);
  CHECK_THROWS_AS(adhm_select(s, 4), ContractViolation);
}

TEST_CASE("belief forward step") {
  CHECK(belief_update_observed({0.0, 0.0}, 1.0, kF, kG, 0.3) == 1.0);
  CHECK(belief_update_observed({0.1, 0.1}, 0.5, kF, kF, 1.7) == doctest::Approx(0.5).epsilon(1e-15));

  // Hand-expanded N/D with independent long-double arithmetic.
  const long double fy = 0.5L * std::exp(-0.05L);
  const long double gy = 10.0L * std::exp(-1.0L);
  const long double n = 0.5L * 0.9L * fy + 0.5L * 0.1L * gy;
  const long double d = 0.5L * fy + 0.5L * gy;
  CHECK(static_cast<double>(n) == doctest::Approx(0.397966).epsilon(2e-6));
  CHECK(static_cast<double>(d) == doctest::Approx(2.07720).epsilon(2e-6));
  const double got = belief_update_observed({0.1, 0.1}, 0.5, kF, kG, 0.1);
  CHECK(std::abs(got - static_cast<double>(n / d)) <= 1e-12);
  CHECK(got == doctest::Approx(0.19159).epsilon(3e-5));
}

TEST_CASE("belief transition-only step") {
  const HmmParams p{0.1, 0.3};
  CHECK(belief_update_transition_only(p, stationary_p0(p)) == doctest::Approx(stationary_p0(p)));
  CHECK(belief_update_transition_only({1.0, 0.0}, 1.0) == 0.0);
  CHECK(belief_update_transition_only({0.1, 0.1}, 0.9) == doctest::Approx(0.82));
  CHECK(belief_update_transition_only({0.1, 0.1}, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("belief updates stay in [0,1]") {
  SplitMix64 rng(77);
  for (int i = 0; i < 20000; ++i) {
    const bool discrete = i % 2 == 1;
    const auto f = discrete ? DistributionSpec::geometric(0.02 + 0.96 * unit_uniform(rng))
                            : DistributionSpec::exponential(0.05 + 30.0 * unit_uniform(rng));
    const auto g = discrete ? DistributionSpec::geometric(0.02 + 0.96 * unit_uniform(rng))
                            : DistributionSpec::exponential(0.05 + 30.0 * unit_uniform(rng));
    const HmmParams h{unit_uniform(rng), unit_uniform(rng)};
    const double p = i % 7 == 0 ? 0.0 : (i % 7 == 1 ? 1.0 : unit_uniform(rng));
    const double y = (bernoulli(rng, 0.5) ? f : g).sample(rng);
    const double b = belief_update_observed(h, p, f, g, y);
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
    const double t = belief_update_transition_only(h, p);
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
  }
}

TEST_CASE("stopping rule on a two-cell instance") {
  const auto model = exp_model(0.9, 0.9);
  const auto pc = policy(PolicyKind::Adhm, 2, 2, std::exp(-1.0));
  const std::vector<Observation> obs{{0, 0.05}, {1, 2.0}};
  auto prime = [&](double s0, double s1) {
    PolicyState st = initial_state(pc, model, 1);
    REQUIRE(initial_decision(st, pc, model).probes == std::vector<std::size_t>{0, 1});
    st.sum_llr = {s0 - llr(kF, kG, st.cell_belief[0], 0.05).value, s1 - llr(kF, kG, st.cell_belief[1], 2.0).value};
    return st;
  };
  PolicyState stop = prime(1.5, 0.4);
  const auto d1 = adhm_step(stop, pc, model, obs);
  CHECK(d1.stopped);
  CHECK(d1.declared == std::optional<std::size_t>{0});
  CHECK_THROWS_AS(adhm_step(stop, pc, model, obs), ContractViolation);

  PolicyState go = prime(1.5, 0.6);
  const auto d2 = adhm_step(go, pc, model, obs);
  CHECK_FALSE(d2.stopped);
  CHECK(d2.probes == std::vector<std::size_t>{0, 1});
}

TEST_CASE("observations must match the pending probe set") {
  const auto model = exp_model(0.9, 0.9);
  const auto pc = policy(PolicyKind::Adhm, 3, 2, 0.01);
  PolicyState st = initial_state(pc, model, 1);
  initial_decision(st, pc, model);
  CHECK_THROWS_AS(adhm_step(st, pc, model, std::vector<Observation>{{0, 0.1}}), ContractViolation);
  CHECK_THROWS_AS(adhm_step(st, pc, model, std::vector<Observation>{{0, 0.1}, {2, 0.1}}), ContractViolation);
  CHECK_THROWS_AS(adhm_step(st, pc, model, std::vector<Observation>{{0, 0.1}, {0, 0.1}}), ContractViolation);
}

TEST_CASE("ADHM-P scheduling rule") {
  const auto model = exp_model(0.1, 0.1);
  auto pc = policy(PolicyKind::AdhmP, 3, 2, 0.005);
  pc.belief_source = BeliefSource::TopCell;
  pc.p_th = 0.7;

  PolicyState st = initial_state(pc, model, 1);
  st.belief_p0 = 0.2;
  CHECK(adhm_p_should_sample(st, pc));

  st.belief_p0 = 0.9;
  CHECK_FALSE(adhm_p_should_sample(st, pc));
  CHECK(initial_decision(st, pc, model).action == StepDecision::Action::Skip);
  const auto next = adhm_p_step(st, pc, model, {});
  CHECK(st.delay_counter == 1);
  CHECK(st.idle == 1);
  CHECK(st.belief_p0 == doctest::Approx(0.82));
  CHECK(next.action == StepDecision::Action::Skip);

  pc.gamma = 0.01;
  PolicyState forced = initial_state(pc, model, 1);
  forced.belief_p0 = 0.9;
  forced.delay_counter = 1;
  CHECK(adhm_p_should_sample(forced, pc));

  // Per-cell mode reads the leader's own belief.
  auto pcell = pc;
  pcell.belief_source = BeliefSource::PerCell;
  pcell.gamma = 0.0;
  PolicyState pst = initial_state(pcell, model, 1);
  pst.sum_llr = {0.0, 2.0, 1.0};
  pst.cell_belief = {0.1, 0.9, 0.1};
  CHECK_FALSE(adhm_p_should_sample(pst, pcell));
  pst.cell_belief[1] = 0.2;
  CHECK(adhm_p_should_sample(pst, pcell));
}

TEST_CASE("Chernoff selection") {
  SplitMix64 rng(5);
  const std::vector<double> two{0.3, -0.2};
  for (int i = 0; i < 100; ++i) {
    auto sel = chernoff_select(two, 2, 0.0, rng);
    CHECK(sel == std::vector<std::size_t>{0, 1});
  }
  const std::vector<double> distinct{0.1, 2.0, -1.0, 0.5};
  for (int i = 0; i < 100; ++i) CHECK(chernoff_select(distinct, 1, 0.0, rng) == std::vector<std::size_t>{1});

  const std::vector<double> frozen{0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  constexpr std::size_t n = 10000;
  std::vector<std::size_t> counts(10, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto sel = chernoff_select(frozen, 2, 0.0, rng);
    REQUIRE(sel.size() == 2);
    REQUIRE(sel[0] == 3);
    REQUIRE(sel[1] != 3);
    ++counts[sel[1]];
  }
  for (std::size_t m = 0; m < 10; ++m) {
    if (m == 3) continue;
    CHECK(std::abs(static_cast<double>(counts[m]) / n - 1.0 / 9.0) <= test::binomial_3sigma(1.0 / 9.0, n));
  }

  // With one probe, exploration visits a uniform non-leader.
  std::size_t explored = 0;
  for (std::size_t i = 0; i < n; ++i) explored += chernoff_select(frozen, 1, 0.25, rng).front() != 3 ? 1 : 0;
  CHECK(std::abs(static_cast<double>(explored) / n - 0.25) <= test::binomial_3sigma(0.25, n));
}

TEST_CASE("oracle policy with a unit level never moves the scores") {
  ObservationModel model = exp_model(0.3, 0.3);
  model.oracle = OraclePalette{{1.0}, {1.0}};
  const auto pc = policy(PolicyKind::AdhmOracle, 4, 2, 0.01);
  PolicyState st = initial_state(pc, model, 1);
  auto d = initial_decision(st, pc, model);
  for (int t = 0; t < 20 && !d.stopped; ++t) {
    std::vector<Observation> obs;
    for (std::size_t c : d.probes) obs.push_back({c, 0.05 * static_cast<double>(t + 1)});
    d = adhm_oracle_step(st, pc, model, obs, 0);
  }
  for (double s : st.sum_llr) CHECK(s == 0.0);
}

TEST_CASE("frozen abnormal chain: ADHM and raw-g DGF coincide") {
  // alpha=1, beta=0 keeps the target in state 1 and the belief at 0, so
  // ADHM's mixture level equals the raw-g baseline.
  ExperimentConfig cfg = experiment(6, 2, {1.0, 0.0});
  cfg.policies = {spec(PolicyKind::Adhm, "ADHM"), spec(PolicyKind::Dgf, "DGF")};
  cfg.policies[1].baseline_llr_mode = BaselineLlrMode::RawG;
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto a = run_trial(cfg, 0, std::exp(-5.0), s);
    const auto b = run_trial(cfg, 1, std::exp(-5.0), s);
    REQUIRE(a.tau == b.tau);
    REQUIRE(a.declared == b.declared);
  }
}

TEST_CASE("ADHM-P with a zero threshold replays ADHM") {
  ExperimentConfig cfg = experiment(10, 2, {0.9, 0.9});
  cfg.policies = {spec(PolicyKind::Adhm, "ADHM"), spec(PolicyKind::AdhmP, "ADHM-P")};
  cfg.policies[1].p_th = 0.0;
  cfg.policies[1].gamma = 1e-3;
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto a = run_trial(cfg, 0, std::exp(-6.0), s);
    const auto b = run_trial(cfg, 1, std::exp(-6.0), s);
    REQUIRE(a.tau == b.tau);
    REQUIRE(a.declared == b.declared);
    REQUIRE(b.idle_steps == 0);
    REQUIRE(a.samples_taken == b.samples_taken);
  }
}

TEST_CASE("oracle policy on a one-level palette matches DGF") {
  // DGF uses the palette mean, which is the single level.
  ExperimentConfig cfg = experiment(5, 2, {0.2, 0.2});
  cfg.model.oracle = OraclePalette{{0.3}, {1.0}};
  cfg.policies = {spec(PolicyKind::AdhmOracle, "oracle"), spec(PolicyKind::Dgf, "DGF")};
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto a = run_trial(cfg, 0, std::exp(-6.0), s);
    const auto b = run_trial(cfg, 1, std::exp(-6.0), s);
    REQUIRE(a.tau == b.tau);
    REQUIRE(a.declared == b.declared);
  }
}

TEST_CASE("indistinguishable laws run into the horizon") {
  ExperimentConfig cfg = experiment(4, 2, {0.3, 0.3});
  cfg.model.abnormal = kF;
  cfg.horizon = 500;
  cfg.policies = {spec(PolicyKind::Adhm, "ADHM")};
  const auto t = run_trial(cfg, 0, 0.01, 3);
  CHECK(t.censored);
  CHECK(t.tau == 500);
}

TEST_CASE("stopping time is monotone in the cost along one trajectory") {
  ExperimentConfig cfg = experiment(10, 2, {0.9, 0.9});
  cfg.policies = {spec(PolicyKind::Adhm, "ADHM"), spec(PolicyKind::Dgf, "DGF"),
                  spec(PolicyKind::Chernoff, "Chernoff")};
  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    for (std::uint64_t s = 0; s < 100; ++s) {
      std::uint64_t prev = 0;
      for (double v : {2.0, 4.0, 6.0, 8.0}) {
        const auto t = run_trial(cfg, p, std::exp(-v), s);
        REQUIRE(t.tau >= prev);
        prev = t.tau;
      }
    }
  }
}

TEST_CASE("Policy wrapper contracts") {
  const auto model = exp_model(0.3, 0.3);
  CHECK_THROWS_AS(Policy(policy(PolicyKind::AdhmOracle, 3, 1, 0.1), model, 1), ContractViolation);
  CHECK_THROWS_AS(Policy(policy(PolicyKind::Adhm, 1, 1, 0.1), model, 1), DomainError);
  CHECK_THROWS_AS(Policy(policy(PolicyKind::Adhm, 3, 4, 0.1), model, 1), DomainError);
  CHECK_THROWS_AS(Policy(policy(PolicyKind::Adhm, 3, 1, 1.0), model, 1), DomainError);
}
