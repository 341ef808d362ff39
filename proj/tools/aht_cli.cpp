// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Command-line driver. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aht/aht.h"

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2 };

enum class Level { Trace, Debug, Info, Warn, Error, Off };

Level g_level = Level::Info;

void log(Level level, const std::string& message) {
  static constexpr const char* kNames[] = {"trace", "debug", "info", "warn", "error", "off"};
  if (level < g_level) return;
  std::fprintf(stderr, "[%s] %s\n", kNames[static_cast<int>(level)], message.c_str());
}

// Failure raised while talking to the library; carries the exit code.
struct CliError {
  int code;
  std::string message;
};

int exit_code(aht_status status) {
  switch (status) {
    case AHT_ERR_CONFIG:
    case AHT_ERR_INVALID_ARGUMENT:
    case AHT_ERR_NOT_FOUND:
      return kUsage;
    default:
      return kFailure;
  }
}

void check(aht_status status, const std::string& what) {
  if (status == AHT_OK) return;
  throw CliError{exit_code(status), what + ": " + aht_status_name(status) + "\n" + aht_last_error()};
}

struct ConfigDeleter {
  void operator()(aht_config* c) const { aht_config_free(c); }
};
struct SweepDeleter {
  void operator()(aht_sweep* s) const { aht_sweep_free(s); }
};
struct ReportDeleter {
  void operator()(aht_verify_report* r) const { aht_verify_free(r); }
};
using ConfigPtr = std::unique_ptr<aht_config, ConfigDeleter>;
using SweepPtr = std::unique_ptr<aht_sweep, SweepDeleter>;
using ReportPtr = std::unique_ptr<aht_verify_report, ReportDeleter>;

std::string take(char* text) {
  std::string out = text == nullptr ? "" : text;
  aht_string_free(text);
  return out;
}

std::string config_field(const aht_config* cfg, const char* key) {
  char* text = nullptr;
  check(aht_config_get(cfg, key, &text), std::string("reading ") + key);
  std::string out = take(text);
  // Strings come back as JSON literals.
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<unsigned long long> seed;
  unsigned workers = 0;
  std::string out;
};

// Loads, applies overrides and validates. Nothing runs on an invalid config.
ConfigPtr load_config(const Common& common, const char* seed_key) {
  aht_config* raw = nullptr;
  check(aht_config_load(common.config.c_str(), &raw), "loading config '" + common.config + "'");
  ConfigPtr cfg(raw);
  for (const auto& s : common.sets) check(aht_config_set(cfg.get(), s.c_str()), "override '" + s + "'");
  if (common.seed && seed_key != nullptr) {
    const std::string assignment = std::string(seed_key) + "=" + std::to_string(*common.seed);
    check(aht_config_set(cfg.get(), assignment.c_str()), "--seed");
  }
  check(aht_config_validate(cfg.get()), "config '" + common.config + "' is invalid");
  log(Level::Debug, "config " + common.config + " validated");
  return cfg;
}

std::filesystem::path output_path(const std::string& out, const std::string& default_name) {
  std::filesystem::path p = out.empty() ? std::filesystem::path(".") : std::filesystem::path(out);
  const auto ext = p.extension();
  if (ext == ".csv" || ext == ".json") {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    return p;
  }
  std::filesystem::create_directories(p);
  return p / default_name;
}

void print_rows(const aht_sweep* sweep) {
  std::printf("%-14s %8s %10s %23s %9s %11s %10s %8s\n", "policy", "-log c", "delay", "delay 95% CI", "error",
              "risk", "samples", "censored");
  for (std::size_t i = 0; i < aht_sweep_row_count(sweep); ++i) {
    aht_sweep_row r{};
    check(aht_sweep_row_at(sweep, i, &r), "reading row");
    std::printf("%-14s %8.3g %10.3f [%10.3f,%10.3f] %9.5f %11.5g %10.3f %8.4f\n", r.policy, r.neg_log_c, r.avg_delay,
                r.delay_ci_lo, r.delay_ci_hi, r.error_rate, r.bayes_risk, r.avg_samples, r.censored_frac);
  }
}

void progress(size_t done, size_t total, void*) {
  log(Level::Info, "trials " + std::to_string(done) + "/" + std::to_string(total));
}

int cmd_presets() {
  for (std::size_t i = 0; i < aht_preset_count(); ++i) {
    const char* name = nullptr;
    const char* summary = nullptr;
    check(aht_preset_info(i, &name, &summary), "listing presets");
    std::printf("%-20s %s\n", name, summary);
  }
  return kOk;
}

int cmd_sweep(const Common& common) {
  const ConfigPtr cfg = load_config(common, "base_seed");
  const std::string name = config_field(cfg.get(), "name");
  log(Level::Info, "sweep " + name + " with " + config_field(cfg.get(), "trials") + " trials per point");
  aht_sweep* raw = nullptr;
  check(aht_sweep_run(cfg.get(), common.workers, g_level <= Level::Info ? progress : nullptr, nullptr, &raw),
        "sweep failed");
  const SweepPtr sweep(raw);
  const auto path = output_path(common.out, name + ".csv");
  check(aht_sweep_write_csv(sweep.get(), path.c_str()), "writing CSV");
  print_rows(sweep.get());
  log(Level::Info, "wrote " + path.string());
  return kOk;
}

int cmd_run(const Common& common, const std::string& policy, std::optional<double> neg_log_c, std::size_t trial) {
  const ConfigPtr cfg = load_config(common, nullptr);
  std::size_t index = 0;
  if (!policy.empty()) {
    if (policy.find_first_not_of("0123456789") == std::string::npos) {
      index = std::stoul(policy);
    } else {
      check(aht_config_find_policy(cfg.get(), policy.c_str(), &index), "--policy");
    }
  }
  const double v = neg_log_c ? *neg_log_c : std::stod(config_field(cfg.get(), "neg_log_c.0"));
  const unsigned long long seed =
      common.seed ? *common.seed : aht_trial_seed(std::stoull(config_field(cfg.get(), "base_seed")), trial);
  aht_trial_result r{};
  check(aht_run_trial(cfg.get(), index, std::exp(-v), seed, &r), "trial failed");
  const std::string label = config_field(cfg.get(), ("policies." + std::to_string(index) + ".label").c_str());
  std::printf(
      "{\"policy\": \"%s\", \"neg_log_c\": %.17g, \"seed\": %llu, \"tau\": %llu, \"declared\": %zu, "
      "\"anomalous\": %zu, \"correct\": %s, \"samples_taken\": %llu, \"idle_steps\": %llu, \"censored\": %s}\n",
      label.c_str(), v, static_cast<unsigned long long>(r.seed), static_cast<unsigned long long>(r.tau), r.declared,
      r.anomalous, r.correct ? "true" : "false", static_cast<unsigned long long>(r.samples_taken),
      static_cast<unsigned long long>(r.idle_steps), r.censored ? "true" : "false");
  return kOk;
}

int cmd_verify(const Common& common, const std::vector<std::string>& only) {
  const ConfigPtr cfg = load_config(common, "verify.seed");
  std::vector<const char*> names;
  for (const auto& n : only) names.push_back(n.c_str());
  aht_verify_report* raw = nullptr;
  check(aht_verify_run(cfg.get(), names.data(), names.size(), &raw), "verify");
  const ReportPtr report(raw);
  for (std::size_t i = 0; i < aht_verify_suite_count(report.get()); ++i) {
    aht_verify_suite s{};
    check(aht_verify_suite_at(report.get(), i, &s), "reading suite");
    std::printf("%-4s %-15s %zu checked, %zu failed: %s\n", s.passed ? "PASS" : "FAIL", s.name, s.checked, s.failed,
                s.summary);
  }
  char* json = nullptr;
  check(aht_verify_to_json(report.get(), &json), "serializing report");
  const std::string text = take(json);
  if (!common.out.empty()) {
    const auto path = output_path(common.out, "verify.json");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (f == nullptr) throw CliError{kFailure, "cannot open '" + path.string() + "' for writing"};
    std::fputs(text.c_str(), f);
    std::fputc('\n', f);
    std::fclose(f);
    log(Level::Info, "wrote " + path.string());
  }
  const bool passed = aht_verify_passed(report.get()) != 0;
  if (!passed) {
    // Failing instances, serialized for replay.
    std::fprintf(stderr, "%s\n", text.c_str());
  }
  return passed ? kOk : kFailure;
}

int cmd_analyze(const Common& common, const std::vector<std::string>& csvs) {
  if (common.config.empty() && csvs.empty()) throw CliError{kUsage, "analyze needs --config and/or CSV files"};
  if (!common.config.empty()) {
    const ConfigPtr cfg = load_config(common, nullptr);
    char* json = nullptr;
    check(aht_analyze_json(cfg.get(), &json), "analysis failed");
    std::printf("%s\n", take(json).c_str());
  }
  for (const auto& path : csvs) {
    aht_sweep* raw = nullptr;
    check(aht_sweep_read_csv(path.c_str(), &raw), "reading '" + path + "'");
    const SweepPtr sweep(raw);
    std::printf("%s\n", path.c_str());
    print_rows(sweep.get());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active search for an anomalous cell with hidden Markov dynamics"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", aht_version());

  std::string level = "info";
  app.add_option("--log-level", level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  Common common;
  auto add_config = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--config,-c", common.config, "config file, preset name or alias");
    if (required) opt->required();
    sub->add_option("--set,-s", common.sets, "override key=value (dotted path, repeatable)");
  };

  auto* presets = app.add_subcommand("presets", "list shipped configs");

  auto* sweep = app.add_subcommand("sweep", "run every (policy, cost) point and write a CSV");
  add_config(sweep, true);
  sweep->add_option("--out,-o", common.out, "output directory, or a .csv path");
  sweep->add_option("--workers,-j", common.workers, "worker threads (default AHT_WORKERS or all cores)");
  sweep->add_option("--seed", common.seed, "base seed");

  std::string policy;
  std::optional<double> neg_log_c;
  std::size_t trial = 0;
  auto* run = app.add_subcommand("run", "replay one trial and print its outcome");
  add_config(run, true);
  run->add_option("--policy,-p", policy, "policy label or index (default 0)");
  run->add_option("--neg-log-c", neg_log_c, "-log c (default the first grid point)");
  run->add_option("--trial", trial, "trial index within a sweep");
  run->add_option("--seed", common.seed, "explicit trial seed, overriding --trial");

  std::vector<std::string> only;
  auto* verify = app.add_subcommand("verify", "run the numerical invariant suites");
  add_config(verify, false);
  verify->add_option("--only", only, "suite(s) to run")->delimiter(',');
  verify->add_option("--seed", common.seed, "seed of the randomized instances");
  verify->add_option("--out,-o", common.out, "directory, or a .json path, for the full report");

  std::vector<std::string> csvs;
  auto* analyze = app.add_subcommand("analyze", "rate predictions for a config and summaries of sweep CSVs");
  add_config(analyze, false);
  analyze->add_option("csv", csvs, "sweep CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  g_level = level == "trace"   ? Level::Trace
            : level == "debug" ? Level::Debug
            : level == "info"  ? Level::Info
            : level == "warn"  ? Level::Warn
            : level == "error" ? Level::Error
                               : Level::Off;

  try {
    if (presets->parsed()) return cmd_presets();
    if (sweep->parsed()) return cmd_sweep(common);
    if (run->parsed()) return cmd_run(common, policy, neg_log_c, trial);
    if (verify->parsed()) {
      if (common.config.empty()) common.config = "fig2_exp";
      return cmd_verify(common, only);
    }
    if (analyze->parsed()) return cmd_analyze(common, csvs);
  } catch (const CliError& e) {
    log(Level::Error, e.message);
    return e.code;
  } catch (const std::exception& e) {
    log(Level::Error, e.what());
    return kFailure;
  }
  return kUsage;
}
