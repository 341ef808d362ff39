// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "aht/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "aht/error.hpp"
#include "aht/policy.hpp"
#include "aht/world.hpp"

namespace aht {

namespace {

constexpr double kZ95 = 1.959963984540054;

enum SeedStream : std::uint64_t { kWorldSeed = 11, kPolicySeed = 12 };

struct MeanCi {
  double mean = 0.0;
  Interval ci;
};

MeanCi t_interval(std::span<const double> xs) {
  const auto n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  if (xs.size() < 2) return {mean, {mean, mean}};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double half = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(n);
  return {mean, {mean - half, mean + half}};
}

std::string csv_number(double v) { return fmt::format("{}", v); }

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view text, const std::string& where) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw IoError(fmt::format("{}: cannot parse number '{}'", where, text));
  }
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial_index) {
  return derive_seed({base_seed, trial_index});
}

TrialOutcome run_trial(const ExperimentConfig& config, std::size_t policy_index, double cost, std::uint64_t seed) {
  const PolicyConfig pc = config.policy_config(policy_index, cost);
  pc.validate();
  World world(config.model, config.cells, derive_seed({seed, kWorldSeed}));
  Policy policy(pc, config.model, derive_seed({seed, kPolicySeed}));

  const StepDecision* decision = &policy.start();
  while (!decision->stopped && world.time() < config.horizon) {
    const auto revealed = world.revealed_component();
    if (decision->action == StepDecision::Action::Probe) {
      const auto observations = world.observe(decision->probes);
      decision = &policy.step(observations, revealed);
    } else {
      world.idle();
      decision = &policy.step({}, revealed);
    }
  }

  TrialOutcome out;
  out.policy_index = policy_index;
  out.cost = cost;
  out.tau = world.time();
  out.anomalous = world.anomalous_cell();
  out.censored = !decision->stopped;
  out.declared = decision->stopped ? *decision->declared : leading_cell(policy.state().sum_llr);
  out.correct = out.declared == out.anomalous;
  out.samples_taken = policy.state().samples;
  out.idle_steps = policy.state().idle;
  out.seed = seed;
  out.clamp_events = policy.state().clamp_events;
  return out;
}

double aggregate_bayes_risk(std::span<const TrialOutcome> outcomes, double cost) {
  if (outcomes.empty()) throw ContractViolation("cannot aggregate an empty set of trials");
  std::size_t errors = 0;
  double delay = 0.0;
  for (const auto& o : outcomes) {
    errors += o.correct ? 0 : 1;
    delay += static_cast<double>(o.tau);
  }
  const auto n = static_cast<double>(outcomes.size());
  return static_cast<double>(errors) / n + cost * (delay / n);
}

Interval wilson_interval(std::size_t successes, std::size_t trials) {
  const auto n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  // The bounds at p = 0 and p = 1 are exactly 0 and 1; rounding would leave
  // them a few ulps inside.
  return {successes == 0 ? 0.0 : std::max(0.0, center - half),
          successes == trials ? 1.0 : std::min(1.0, center + half)};
}

SweepRow aggregate(std::span<const TrialOutcome> outcomes, double cost, double gamma) {
  if (outcomes.empty()) throw ContractViolation("cannot aggregate an empty set of trials");
  const std::size_t n = outcomes.size();
  std::vector<double> delays;
  std::vector<double> losses;
  delays.reserve(n);
  losses.reserve(n);
  std::size_t errors = 0;
  std::size_t censored = 0;
  double samples = 0.0;
  double idle = 0.0;
  SweepRow row;
  for (const auto& o : outcomes) {
    errors += o.correct ? 0 : 1;
    censored += o.censored ? 1 : 0;
    samples += static_cast<double>(o.samples_taken);
    idle += static_cast<double>(o.idle_steps);
    delays.push_back(static_cast<double>(o.tau));
    losses.push_back((o.correct ? 0.0 : 1.0) + cost * static_cast<double>(o.tau));
    row.clamp_events += o.clamp_events;
  }
  const auto dn = static_cast<double>(n);
  const MeanCi delay = t_interval(delays);
  row.cost = cost;
  row.neg_log_c = -std::log(cost);
  row.trials = n;
  row.avg_delay = delay.mean;
  row.delay_ci = delay.ci;
  row.error_rate = static_cast<double>(errors) / dn;
  row.error_ci = wilson_interval(errors, n);
  row.bayes_risk = row.error_rate + cost * row.avg_delay;
  row.risk_ci = t_interval(losses).ci;
  row.avg_samples = samples / dn;
  row.avg_idle = idle / dn;
  row.sampling_risk = row.error_rate + cost * row.avg_samples + gamma * row.avg_idle;
  row.censored_frac = static_cast<double>(censored) / dn;
  return row;
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("AHT_WORKERS")) {
    unsigned v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult run_sweep(const ExperimentConfig& config, const SweepOptions& options) {
  config.validate();
  const unsigned workers = resolve_workers(options.workers);
  const std::size_t total = config.policies.size() * config.neg_log_c.size() * config.trials;
  std::size_t done = 0;

  SweepResult result;
  result.name = config.name;
  std::vector<TrialOutcome> outcomes(config.trials);
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    for (std::size_t ci = 0; ci < config.neg_log_c.size(); ++ci) {
      const double cost = std::exp(-config.neg_log_c[ci]);
      std::atomic<std::size_t> next{0};
      std::exception_ptr failure;
      std::mutex failure_mutex;
      auto work = [&] {
        try {
          for (std::size_t t = next++; t < config.trials; t = next++) {
            outcomes[t] = run_trial(config, p, cost, trial_seed(config.base_seed, t));
          }
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = config.trials;
        }
      };
      const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, config.trials));
      if (n_threads <= 1) {
        work();
      } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(work);
      }
      if (failure) std::rethrow_exception(failure);

      SweepRow row = aggregate(outcomes, cost, config.policies[p].gamma);
      row.policy = config.policies[p].label;
      row.policy_index = p;
      row.neg_log_c = config.neg_log_c[ci];
      row.base_seed = config.base_seed;
      result.rows.push_back(std::move(row));
      done += config.trials;
      if (options.progress) options.progress(done, total);
    }
  }
  return result;
}

std::string to_csv(const SweepResult& result) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : result.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.policy, csv_number(r.cost),
                       csv_number(r.neg_log_c), r.trials, csv_number(r.avg_delay), csv_number(r.delay_ci.lo),
                       csv_number(r.delay_ci.hi), csv_number(r.error_rate), csv_number(r.error_ci.lo),
                       csv_number(r.error_ci.hi), csv_number(r.bayes_risk), csv_number(r.avg_samples),
                       csv_number(r.avg_idle), csv_number(r.censored_frac), r.base_seed);
  }
  return out;
}

void write_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  out << to_csv(result);
  if (!out.flush()) throw IoError(fmt::format("failed writing '{}'", path));
}

SweepResult parse_csv(std::string_view text, std::string origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.empty()) throw IoError(fmt::format("{}: empty CSV", origin));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t, std::less<>> column;
  for (std::size_t i = 0; i < header.size(); ++i) column.emplace(std::string(header[i]), i);
  for (const auto name : split_csv_line(kCsvHeader)) {
    if (!column.contains(name)) throw IoError(fmt::format("{}: missing column '{}'", origin, name));
  }

  SweepResult result;
  result.name = origin;
  std::map<std::string, std::size_t> policy_ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw IoError(fmt::format("{}:{}: expected {} fields, got {}", origin, line_no, header.size(), fields.size()));
    }
    const std::string where = fmt::format("{}:{}", origin, line_no);
    auto num = [&](std::string_view name) { return parse_double(fields[column.find(name)->second], where); };
    SweepRow r;
    r.policy = std::string(fields[column.find("policy")->second]);
    r.policy_index = policy_ids.emplace(r.policy, policy_ids.size()).first->second;
    r.cost = num("c");
    r.neg_log_c = num("neg_log_c");
    r.trials = static_cast<std::size_t>(num("trials"));
    r.avg_delay = num("avg_delay");
    r.delay_ci = {num("delay_ci_lo"), num("delay_ci_hi")};
    r.error_rate = num("error_rate");
    r.error_ci = {num("err_ci_lo"), num("err_ci_hi")};
    r.bayes_risk = num("bayes_risk");
    r.avg_samples = num("avg_samples");
    r.avg_idle = num("avg_idle");
    r.censored_frac = num("censored_frac");
    r.base_seed = static_cast<std::uint64_t>(num("base_seed"));
    result.rows.push_back(std::move(r));
  }
  return result;
}

SweepResult read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path);
}

}  // namespace aht
