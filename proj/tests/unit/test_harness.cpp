// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include "doctest.h"

#include "aht/config.hpp"
#include "aht/error.hpp"
#include "aht/harness.hpp"

using namespace aht;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg = ConfigDocument::from_preset("fig2_exp").parse();
  cfg.trials = 200;
  cfg.neg_log_c = {2.0, 4.0};
  return cfg;
}

TrialOutcome outcome(std::uint64_t tau, bool correct) {
  TrialOutcome t;
  t.tau = tau;
  t.correct = correct;
  t.samples_taken = tau;
  return t;
}

}  // namespace

TEST_CASE("Bayes risk aggregation") {
  const std::vector<TrialOutcome> good(5, outcome(10, true));
  CHECK(aggregate_bayes_risk(good, 0.01) == doctest::Approx(0.1));
  const std::vector<TrialOutcome> bad(5, outcome(10, false));
  CHECK(aggregate_bayes_risk(bad, 1e-300) == doctest::Approx(1.0));
  CHECK_THROWS_AS(aggregate_bayes_risk({}, 0.1), ContractViolation);
}

TEST_CASE("one trial aggregates to itself") {
  const std::vector<TrialOutcome> one{outcome(17, false)};
  const SweepRow r = aggregate(one, 0.05, 0.0);
  CHECK(r.trials == 1);
  CHECK(r.avg_delay == 17.0);
  CHECK(r.error_rate == 1.0);
  CHECK(r.bayes_risk == doctest::Approx(1.0 + 0.05 * 17));
  CHECK(r.avg_samples == 17.0);
  CHECK(r.delay_ci.lo == 17.0);
  CHECK(r.delay_ci.hi == 17.0);
}

TEST_CASE("interval estimates") {
  // Wilson score interval, written out independently.
  const double z = 1.959963984540054;
  const double n = 40.0;
  const double p = 7.0 / n;
  const double center = (p + z * z / (2 * n)) / (1 + z * z / n);
  const double half = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  const Interval w = wilson_interval(7, 40);
  CHECK(w.lo == doctest::Approx(center - half).epsilon(1e-14));
  CHECK(w.hi == doctest::Approx(center + half).epsilon(1e-14));
  CHECK(wilson_interval(0, 10).lo == 0.0);
  CHECK(wilson_interval(10, 10).hi == 1.0);

  // Delays 1..4: mean 2.5, sd sqrt(5/3), t(0.975, 3) = 3.182446305284263.
  std::vector<TrialOutcome> four;
  for (std::uint64_t k = 1; k <= 4; ++k) four.push_back(outcome(k, true));
  const SweepRow r = aggregate(four, 0.1, 0.0);
  const double h = 3.182446305284263 * std::sqrt(5.0 / 3.0) / 2.0;
  CHECK(r.delay_ci.lo == doctest::Approx(2.5 - h).epsilon(1e-12));
  CHECK(r.delay_ci.hi == doctest::Approx(2.5 + h).epsilon(1e-12));
}

TEST_CASE("sampling risk charges idle steps at gamma") {
  std::vector<TrialOutcome> xs(2, outcome(100, true));
  xs[0].samples_taken = 10;
  xs[0].idle_steps = 90;
  xs[1].samples_taken = 20;
  xs[1].idle_steps = 80;
  const SweepRow r = aggregate(xs, 0.01, 1e-4);
  CHECK(r.avg_samples == 15.0);
  CHECK(r.avg_idle == 85.0);
  CHECK(r.sampling_risk == doctest::Approx(0.01 * 15 + 1e-4 * 85));
  CHECK(r.bayes_risk == doctest::Approx(1.0));
}

TEST_CASE("trials are reproducible from their seed") {
  const auto cfg = small_config();
  for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
    const auto a = run_trial(cfg, p, 0.01, 12345);
    const auto b = run_trial(cfg, p, 0.01, 12345);
    CHECK(a == b);
  }
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
}

TEST_CASE("well separated laws are found") {
  // Target pinned in the abnormal state.
  ExperimentConfig cfg = small_config();
  cfg.model.hmm = {1.0 - 1e-9, 1e-9};
  std::size_t correct = 0;
  for (std::size_t t = 0; t < 1000; ++t) {
    const auto o = run_trial(cfg, 0, 1e-3, trial_seed(9, t));
    REQUIRE_FALSE(o.censored);
    correct += o.correct ? 1 : 0;
  }
  CHECK(correct >= 990);
}

TEST_CASE("sweep results do not depend on the worker count") {
  const auto cfg = small_config();
  SweepOptions one;
  one.workers = 1;
  SweepOptions three;
  three.workers = 3;
  const auto a = run_sweep(cfg, one);
  const auto b = run_sweep(cfg, three);
  CHECK(a.rows.size() == cfg.policies.size() * cfg.neg_log_c.size());
  CHECK(to_csv(a) == to_csv(b));
  CHECK(a.rows[0].policy == "ADHM");
  CHECK(a.rows[2].policy == "DGF");
}

TEST_CASE("progress callback reports every trial") {
  const auto cfg = small_config();
  SweepOptions opts;
  opts.workers = 2;
  std::size_t last = 0;
  std::size_t calls = 0;
  opts.progress = [&](std::size_t done, std::size_t total) {
    CHECK(done > last);
    CHECK(total == cfg.trials * 6);
    last = done;
    ++calls;
  };
  run_sweep(cfg, opts);
  CHECK(calls == 6);
  CHECK(last == cfg.trials * 6);
}

TEST_CASE("CSV round trip") {
  const auto cfg = small_config();
  const auto a = run_sweep(cfg);
  const std::string text = to_csv(a);
  CHECK(text.substr(0, kCsvHeader.size()) == kCsvHeader);
  const auto b = parse_csv(text);
  REQUIRE(b.rows.size() == a.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(b.rows[i].policy == a.rows[i].policy);
    CHECK(b.rows[i].cost == a.rows[i].cost);
    CHECK(b.rows[i].avg_delay == a.rows[i].avg_delay);
    CHECK(b.rows[i].delay_ci.hi == a.rows[i].delay_ci.hi);
    CHECK(b.rows[i].bayes_risk == a.rows[i].bayes_risk);
    CHECK(b.rows[i].trials == a.rows[i].trials);
    CHECK(b.rows[i].base_seed == a.rows[i].base_seed);
  }
  CHECK(to_csv(b) == text);
}

TEST_CASE("malformed CSVs are rejected") {
  CHECK_THROWS_AS(parse_csv(""), IoError);
  CHECK_THROWS_AS(parse_csv("policy,c\nADHM,0.1\n"), IoError);
  std::string text(kCsvHeader);
  text += "\nADHM,0.1,2.3\n";
  CHECK_THROWS_AS(parse_csv(text), IoError);
  CHECK_THROWS_AS(read_csv("/nonexistent/sweep.csv"), IoError);
}

TEST_CASE("worker resolution") {
  CHECK(resolve_workers(3) == 3);
  CHECK(resolve_workers(0) >= 1);
}
