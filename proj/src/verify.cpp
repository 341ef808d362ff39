// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "aht/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "aht/analysis.hpp"
#include "aht/error.hpp"
#include "aht/harness.hpp"
#include "aht/policy.hpp"
#include "aht/rng.hpp"

namespace aht {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 5> kSuites{"kl-closed-form", "mixture-kl", "theorem2", "belief",
                                                  "oracle-delay"};

enum class Family { Exponential, Geometric };

double uniform(SplitMix64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

DistributionSpec random_law(Family family, SplitMix64& rng) {
  if (family == Family::Exponential) return DistributionSpec::exponential(std::exp(uniform(rng, std::log(0.1), std::log(20.0))));
  return DistributionSpec::geometric(uniform(rng, 0.05, 0.95));
}

std::vector<double> random_weights(std::size_t n, SplitMix64& rng) {
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log1p(-unit_uniform(rng)) + 1e-3;
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

json law_json(const DistributionSpec& d) {
  switch (d.kind()) {
    case DistributionKind::Exponential:
      return {{"family", "exponential"}, {"rate", d.parameter()}};
    case DistributionKind::Geometric:
      return {{"family", "geometric"}, {"success", d.parameter()}};
    case DistributionKind::Tabulated:
      return {{"family", "tabulated"}, {"probs", std::vector<double>(d.probabilities().begin(), d.probabilities().end())}};
  }
  return {};
}

json mixture_json(const Mixture& m) {
  json out = json::array();
  for (const auto& c : m.components()) out.push_back({{"weight", c.weight}, {"law", law_json(c.law)}});
  return out;
}

std::uint64_t suite_seed(std::uint64_t seed, std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : name) h = (h ^ static_cast<unsigned char>(ch)) * 0x100000001b3ULL;
  return derive_seed({seed, h});
}

// Records one check; `violation` > 0 means failure.
void record(SuiteResult& s, double violation, const std::function<json()>& instance) {
  ++s.checked;
  s.worst = std::max(s.worst, violation);
  if (violation > 0.0 || std::isnan(violation)) {
    ++s.failed;
    s.passed = false;
    if (s.failures.size() < 20) s.failures.push_back(instance());
  }
}

bool has_closed_family(const ExperimentConfig& cfg) {
  return cfg.model.normal.kind() != DistributionKind::Tabulated &&
         cfg.model.normal.kind() == cfg.model.abnormal.kind();
}

SuiteResult suite_kl(const ExperimentConfig& cfg) {
  const auto& v = cfg.verify;
  SuiteResult s;
  s.name = "kl-closed-form";
  SplitMix64 rng(suite_seed(v.seed, s.name));
  double worst_diff = 0.0;
  auto check = [&](const DistributionSpec& p, const DistributionSpec& q) {
    const double closed = *kl_closed_form(p, q);
    const KlResult numeric = kl_numeric(p, q);
    const double diff = std::abs(closed - numeric.value);
    worst_diff = std::max(worst_diff, diff);
    record(s, std::max(diff - v.tol, -closed - v.tol), [&] {
      return json{{"p", law_json(p)}, {"q", law_json(q)}, {"closed_form", closed}, {"numeric", numeric.value},
                  {"abs_error", numeric.abs_error}, {"tol", v.tol}};
    });
  };
  if (has_closed_family(cfg)) {
    check(cfg.model.normal, cfg.model.abnormal);
    check(cfg.model.abnormal, cfg.model.normal);
  }
  for (Family fam : {Family::Exponential, Family::Geometric}) {
    for (std::size_t i = 0; i < v.kl_pairs; ++i) {
      const auto p = random_law(fam, rng);
      const auto q = random_law(fam, rng);
      check(p, q);
    }
  }
  s.summary = fmt::format("{} pairs, max |closed - numeric| = {:.3g} (tol {:g})", s.checked, worst_diff, v.tol);
  return s;
}

SuiteResult suite_mixture(const ExperimentConfig& cfg) {
  const auto& v = cfg.verify;
  SuiteResult s;
  s.name = "mixture-kl";
  SplitMix64 rng(suite_seed(v.seed, s.name));
  double min_slack = INFINITY;
  double worst_route = 0.0;
  for (std::size_t i = 0; i < v.mixture_instances; ++i) {
    const Family fam = i % 2 == 0 ? Family::Exponential : Family::Geometric;
    const auto f = random_law(fam, rng);
    const std::size_t d = 1 + uniform_index(rng, 4);
    // Every tenth instance repeats one component: the equality case.
    const bool identical = i % 10 == 5;
    const auto w = random_weights(d, rng);
    std::vector<std::pair<double, Mixture>> comps;
    const Mixture first = Mixture::two_point(unit_uniform(rng), f, random_law(fam, rng));
    for (std::size_t k = 0; k < d; ++k) {
      comps.emplace_back(w[k], identical || k == 0 ? first
                                                   : Mixture::two_point(unit_uniform(rng), f, random_law(fam, rng)));
    }
    const MixtureKlReport r = verify_mixture_kl_inequality(f, comps);
    min_slack = std::min(min_slack, r.slack);
    const double route = std::abs(r.slack - r.posterior_term);
    worst_route = std::max(worst_route, route);
    double violation = std::max(-r.slack - v.tol, route - v.tol);
    if (identical || d == 1) violation = std::max(violation, std::abs(r.slack) - v.tol);
    record(s, violation, [&] {
      json c = json::array();
      for (const auto& [wt, m] : comps) c.push_back({{"weight", wt}, {"mixture", mixture_json(m)}});
      return json{{"f", law_json(f)},   {"components", c},         {"lhs", r.lhs},
                  {"rhs", r.rhs},       {"slack", r.slack},        {"posterior_term", r.posterior_term},
                  {"tol", v.tol},       {"equality_case", identical || d == 1}};
    });
  }
  s.summary = fmt::format("{} instances, min slack = {:.3g}, max |slack - posterior term| = {:.3g} (tol {:g})",
                          s.checked, min_slack, worst_route, v.tol);
  return s;
}

SuiteResult suite_theorem2(const ExperimentConfig& cfg) {
  const auto& v = cfg.verify;
  SuiteResult s;
  s.name = "theorem2";
  SplitMix64 rng(suite_seed(v.seed, s.name));
  double min_gap = INFINITY;
  auto check = [&](const DistributionSpec& f, const DistributionSpec& g, const OraclePalette& pal, std::size_t m,
                   std::size_t k, bool equal_levels) {
    const Theorem2Report r = theorem2_gap(f, g, pal, m, k);
    min_gap = std::min(min_gap, r.gap);
    double violation = -r.gap - v.tol;
    if (equal_levels) violation = std::max(violation, std::abs(r.gap) - v.tol);
    record(s, violation, [&] {
      return json{{"f", law_json(f)},         {"g", law_json(g)},          {"levels", pal.levels},
                  {"weights", pal.weights},   {"cells", m},                {"probes", k},
                  {"I_adhm", r.I_adhm},       {"I_chernoff", r.I_chernoff}, {"gap", r.gap},
                  {"tol", v.tol},             {"equal_levels", equal_levels}};
    });
  };
  const OraclePalette own = cfg.model.oracle ? *cfg.model.oracle : state_revealing_palette(cfg.model.hmm);
  check(cfg.model.normal, cfg.model.abnormal, own, cfg.cells, cfg.probes, own.size() == 1);
  for (std::size_t i = 0; i < v.palettes; ++i) {
    const Family fam = i % 2 == 0 ? Family::Exponential : Family::Geometric;
    const auto f = random_law(fam, rng);
    const auto g = random_law(fam, rng);
    const std::size_t d = 1 + uniform_index(rng, 5);
    const bool equal_levels = d == 1 || i % 10 == 3;
    OraclePalette pal{{}, random_weights(d, rng)};
    const double shared = unit_uniform(rng);
    for (std::size_t k = 0; k < d; ++k) pal.levels.push_back(equal_levels ? shared : unit_uniform(rng));
    const std::size_t m = 2 + uniform_index(rng, 19);
    const std::size_t k = 1 + uniform_index(rng, m);
    check(f, g, pal, m, k, equal_levels);
  }
  s.summary = fmt::format("{} palettes, min gap = {:.3g} (tol {:g})", s.checked, min_gap, v.tol);
  return s;
}

SuiteResult suite_belief(const ExperimentConfig& cfg) {
  const auto& v = cfg.verify;
  SuiteResult s;
  s.name = "belief";
  const double tol = std::min(v.tol, 1e-12);
  double worst = 0.0;
  auto check = [&](const HmmParams& hmm, double p0, const DistributionSpec& f, const DistributionSpec& g, double y,
                   double expected) {
    const double got = belief_update_observed(hmm, p0, f, g, y);
    const double diff = std::abs(got - expected);
    worst = std::max(worst, diff);
    record(s, diff - tol, [&] {
      return json{{"alpha", hmm.alpha}, {"beta", hmm.beta}, {"p0", p0},         {"f", law_json(f)}, {"g", law_json(g)},
                  {"y", y},             {"got", got},       {"expected", expected}, {"tol", tol}};
    });
  };
  const auto f = DistributionSpec::exponential(0.5);
  const auto g = DistributionSpec::exponential(10.0);
  {
    // Hand-expanded forward step with scalar arithmetic only.
    const double fy = 0.5 * std::exp(-0.5 * 0.1);
    const double gy = 10.0 * std::exp(-10.0 * 0.1);
    const double num = 0.5 * 0.9 * fy + 0.5 * 0.1 * gy;
    const double den = 0.5 * fy + 0.5 * gy;
    check(HmmParams{0.1, 0.1}, 0.5, f, g, 0.1, num / den);
  }
  // Uninformative observation at the stationary point.
  check(HmmParams{0.1, 0.1}, 0.5, f, f, 1.3, 0.5);
  // Boundedness over random inputs.
  SplitMix64 rng(suite_seed(v.seed, s.name));
  std::size_t out_of_range = 0;
  for (int i = 0; i < 1000; ++i) {
    const Family fam = i % 2 == 0 ? Family::Exponential : Family::Geometric;
    const auto fa = random_law(fam, rng);
    const auto ga = random_law(fam, rng);
    const HmmParams hmm{uniform(rng, 1e-3, 1.0 - 1e-3), uniform(rng, 1e-3, 1.0 - 1e-3)};
    const double p0 = unit_uniform(rng);
    const double y = fa.sample(rng);
    const double b = belief_update_observed(hmm, p0, fa, ga, y);
    const double violation = std::max(-b, b - 1.0) + (tol < 0.0 ? -tol : 0.0);
    if (violation > 0.0) ++out_of_range;
    record(s, violation, [&] {
      return json{{"alpha", hmm.alpha}, {"beta", hmm.beta}, {"p0", p0},   {"f", law_json(fa)},
                  {"g", law_json(ga)},  {"y", y},           {"got", b}};
    });
  }
  s.summary = fmt::format("{} checks, max forward-step error = {:.3g} (tol {:g}), {} out of [0,1]", s.checked, worst,
                          tol, out_of_range);
  return s;
}

SuiteResult suite_oracle(const ExperimentConfig& cfg) {
  const auto& v = cfg.verify;
  SuiteResult s;
  s.name = "oracle-delay";
  ExperimentConfig oc = cfg;
  oc.name = cfg.name + "/oracle";
  if (!oc.model.oracle) oc.model.oracle = state_revealing_palette(cfg.model.hmm);
  PolicySpec oracle;
  oracle.kind = PolicyKind::AdhmOracle;
  oracle.label = "ADHM-Oracle";
  oc.policies = {oracle};
  oc.neg_log_c = {v.oracle_neg_log_c};
  oc.trials = v.oracle_trials;
  oc.base_seed = v.seed;
  const RateReport rate = rate_I_star(oc.model.normal, oc.model.abnormal, *oc.model.oracle, oc.cells, oc.probes);
  const SweepRow row = run_sweep(oc).rows.front();
  const double ratio = row.avg_delay * rate.I_star / v.oracle_neg_log_c;
  const double violation = std::max({v.oracle_band_lo - ratio, ratio - v.oracle_band_hi, row.censored_frac});
  record(s, violation, [&] {
    return json{{"levels", oc.model.oracle->levels}, {"weights", oc.model.oracle->weights},
                {"I_star", rate.I_star},             {"neg_log_c", v.oracle_neg_log_c},
                {"avg_delay", row.avg_delay},        {"ratio", ratio},
                {"band", {v.oracle_band_lo, v.oracle_band_hi}}, {"censored_frac", row.censored_frac},
                {"trials", oc.trials},               {"seed", oc.base_seed}};
  });
  s.summary = fmt::format("avg delay {:.3f} vs predicted {:.3f} at -log c = {:g}: ratio {:.4f} (band [{:g}, {:g}])",
                          row.avg_delay, rate.predicted_delay(std::exp(-v.oracle_neg_log_c)), v.oracle_neg_log_c,
                          ratio, v.oracle_band_lo, v.oracle_band_hi);
  return s;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

json VerifyReport::to_json() const {
  json out = {{"passed", passed()}, {"suites", json::array()}};
  for (const auto& s : suites) {
    out["suites"].push_back({{"name", s.name},
                             {"passed", s.passed},
                             {"checked", s.checked},
                             {"failed", s.failed},
                             {"worst", s.worst},
                             {"summary", s.summary},
                             {"failures", s.failures}});
  }
  return out;
}

std::span<const std::string_view> verify_suite_names() noexcept { return kSuites; }

VerifyReport run_verify(const ExperimentConfig& config, std::span<const std::string> only) {
  config.validate();
  for (const auto& name : only) {
    if (std::find(kSuites.begin(), kSuites.end(), name) == kSuites.end()) {
      throw ConfigError("only", fmt::format("unknown verify suite '{}'", name));
    }
  }
  auto selected = [&](std::string_view name) {
    return only.empty() || std::find(only.begin(), only.end(), name) != only.end();
  };
  VerifyReport report;
  if (selected("kl-closed-form")) report.suites.push_back(suite_kl(config));
  if (selected("mixture-kl")) report.suites.push_back(suite_mixture(config));
  if (selected("theorem2")) report.suites.push_back(suite_theorem2(config));
  if (selected("belief")) report.suites.push_back(suite_belief(config));
  if (selected("oracle-delay")) report.suites.push_back(suite_oracle(config));
  return report;
}

}  // namespace aht
