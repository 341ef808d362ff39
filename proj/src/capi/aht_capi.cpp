// SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "aht/aht.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "aht/analysis.hpp"
#include "aht/config.hpp"
#include "aht/error.hpp"
#include "aht/harness.hpp"
#include "aht/verify.hpp"

struct aht_config {
  aht::ConfigDocument doc;
};

struct aht_sweep {
  aht::SweepResult result;
};

struct aht_verify_report {
  aht::VerifyReport report;
};

namespace {

thread_local std::string g_last_error;

aht_status fail(aht_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

std::string config_message(const aht::ConfigError& e) {
  std::string out;
  for (const auto& issue : e.issues()) {
    if (!out.empty()) out += '\n';
    out += fmt::format("{}: {}", issue.path, issue.message);
  }
  return out.empty() ? std::string(e.what()) : out;
}

// Runs `body` and maps exceptions onto status codes.
template <typename F>
aht_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return AHT_OK;
  } catch (const aht::ConfigError& e) {
    return fail(AHT_ERR_CONFIG, config_message(e));
  } catch (const aht::IoError& e) {
    return fail(AHT_ERR_IO, e.what());
  } catch (const aht::NumericError& e) {
    return fail(AHT_ERR_NUMERIC, e.what());
  } catch (const aht::DomainError& e) {
    return fail(AHT_ERR_INVALID_ARGUMENT, e.what());
  } catch (const aht::ContractViolation& e) {
    return fail(AHT_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(AHT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(AHT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(AHT_ERR_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define AHT_REQUIRE(ptr)                                                                      \
  do {                                                                                        \
    if ((ptr) == nullptr) return fail(AHT_ERR_INVALID_ARGUMENT, "null argument: " #ptr); \
  } while (0)

aht::OraclePalette palette_of(const aht::ExperimentConfig& cfg) {
  return cfg.model.oracle ? *cfg.model.oracle : aht::state_revealing_palette(cfg.model.hmm);
}

}  // namespace

extern "C" {

const char* aht_version(void) { return "0.1.0"; }

const char* aht_status_name(aht_status status) {
  switch (status) {
    case AHT_OK:
      return "ok";
    case AHT_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case AHT_ERR_CONFIG:
      return "config error";
    case AHT_ERR_IO:
      return "i/o error";
    case AHT_ERR_NUMERIC:
      return "numeric error";
    case AHT_ERR_NOT_FOUND:
      return "not found";
    case AHT_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* aht_last_error(void) { return g_last_error.c_str(); }

void aht_string_free(char* text) { std::free(text); }

size_t aht_preset_count(void) { return aht::presets().size(); }

aht_status aht_preset_info(size_t index, const char** name, const char** summary) {
  const auto all = aht::presets();
  if (index >= all.size()) return fail(AHT_ERR_NOT_FOUND, fmt::format("preset index {} out of range", index));
  // Preset strings are literals, so their data() is NUL-terminated.
  if (name != nullptr) *name = all[index].name.data();
  if (summary != nullptr) *summary = all[index].summary.data();
  g_last_error.clear();
  return AHT_OK;
}

aht_status aht_config_load(const char* path_or_preset, aht_config** out) {
  AHT_REQUIRE(path_or_preset);
  AHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new aht_config{aht::ConfigDocument::resolve(path_or_preset)}; });
}

aht_status aht_config_from_text(const char* text, aht_config** out) {
  AHT_REQUIRE(text);
  AHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new aht_config{aht::ConfigDocument::from_text(text)}; });
}

aht_status aht_config_set(aht_config* config, const char* assignment) {
  AHT_REQUIRE(config);
  AHT_REQUIRE(assignment);
  return guarded([&] { config->doc.set(assignment); });
}

aht_status aht_config_validate(const aht_config* config) {
  AHT_REQUIRE(config);
  return guarded([&] { config->doc.parse().validate(); });
}

aht_status aht_config_to_json(const aht_config* config, int resolved, char** out) {
  AHT_REQUIRE(config);
  AHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = dup_string(resolved != 0 ? aht::to_json(config->doc.parse()).dump(2) : config->doc.dump(2));
  });
}

aht_status aht_config_get(const aht_config* config, const char* dotted_key, char** out) {
  AHT_REQUIRE(config);
  AHT_REQUIRE(dotted_key);
  AHT_REQUIRE(out);
  *out = nullptr;
  bool found = true;
  const aht_status status = guarded([&] {
    const nlohmann::json doc = aht::to_json(config->doc.parse());
    const nlohmann::json* node = &doc;
    std::string_view rest = dotted_key;
    while (found && !rest.empty()) {
      const std::size_t dot = rest.find('.');
      const std::string part(rest.substr(0, dot));
      rest = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);
      if (node->is_object() && node->contains(part)) {
        node = &(*node)[part];
      } else if (node->is_array() && !part.empty() && part.find_first_not_of("0123456789") == std::string::npos &&
                 std::stoull(part) < node->size()) {
        node = &(*node)[std::stoull(part)];
      } else {
        found = false;
      }
    }
    if (found) *out = dup_string(node->dump());
  });
  if (status != AHT_OK) return status;
  return found ? AHT_OK : fail(AHT_ERR_NOT_FOUND, fmt::format("config has no field '{}'", dotted_key));
}

aht_status aht_config_policy_count(const aht_config* config, size_t* out) {
  AHT_REQUIRE(config);
  AHT_REQUIRE(out);
  return guarded([&] { *out = config->doc.parse().policies.size(); });
}

aht_status aht_config_find_policy(const aht_config* config, const char* label, size_t* out) {
  AHT_REQUIRE(config);
  AHT_REQUIRE(label);
  AHT_REQUIRE(out);
  bool found = false;
  const aht_status status = guarded([&] {
    const auto cfg = config->doc.parse();
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
      if (cfg.policies[i].label == label) {
        *out = i;
        found = true;
        return;
      }
    }
  });
  if (status != AHT_OK) return status;
  return found ? AHT_OK : fail(AHT_ERR_NOT_FOUND, fmt::format("no policy labelled '{}'", label));
}

void aht_config_free(aht_config* config) { delete config; }

uint64_t aht_trial_seed(uint64_t base_seed, size_t trial_index) { return aht::trial_seed(base_seed, trial_index); }

aht_status aht_run_trial(const aht_config* config, size_t policy_index, double cost, uint64_t seed,
                         aht_trial_result* out) {
  AHT_REQUIRE(config);
  AHT_REQUIRE(out);
  return guarded([&] {
    const auto cfg = config->doc.parse();
    cfg.validate();
    if (policy_index >= cfg.policies.size()) {
      throw aht::DomainError(
          fmt::format("policy index {} out of range (config has {})", policy_index, cfg.policies.size()));
    }
    const auto t = aht::run_trial(cfg, policy_index, cost, seed);
    *out = aht_trial_result{t.tau,         t.declared,   t.anomalous, t.correct ? 1 : 0,
                            t.samples_taken, t.idle_steps, t.censored ? 1 : 0, t.seed};
  });
}

aht_status aht_sweep_run(const aht_config* config, unsigned workers, aht_progress_fn progress, void* user,
                         aht_sweep** out) {
  AHT_REQUIRE(config);
  AHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    const auto cfg = config->doc.parse();
    cfg.validate();
    aht::SweepOptions options;
    options.workers = workers;
    if (progress != nullptr) options.progress = [&](std::size_t done, std::size_t total) { progress(done, total, user); };
    *out = new aht_sweep{aht::run_sweep(cfg, options)};
  });
}

aht_status aht_sweep_read_csv(const char* path, aht_sweep** out) {
  AHT_REQUIRE(path);
  AHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new aht_sweep{aht::read_csv(path)}; });
}

size_t aht_sweep_row_count(const aht_sweep* sweep) { return sweep == nullptr ? 0 : sweep->result.rows.size(); }

aht_status aht_sweep_row_at(const aht_sweep* sweep, size_t index, aht_sweep_row* out) {
  AHT_REQUIRE(sweep);
  AHT_REQUIRE(out);
  if (index >= sweep->result.rows.size()) {
    return fail(AHT_ERR_NOT_FOUND, fmt::format("row {} out of range ({} rows)", index, sweep->result.rows.size()));
  }
  const auto& r = sweep->result.rows[index];
  *out = aht_sweep_row{r.policy.c_str(), r.cost,           r.neg_log_c,      r.trials,       r.avg_delay,
                       r.delay_ci.lo,    r.delay_ci.hi,    r.error_rate,     r.error_ci.lo,  r.error_ci.hi,
                       r.bayes_risk,     r.risk_ci.lo,     r.risk_ci.hi,     r.avg_samples,  r.avg_idle,
                       r.sampling_risk,  r.censored_frac,  r.base_seed};
  g_last_error.clear();
  return AHT_OK;
}

aht_status aht_sweep_to_csv(const aht_sweep* sweep, char** out) {
  AHT_REQUIRE(sweep);
  AHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = dup_string(aht::to_csv(sweep->result)); });
}

aht_status aht_sweep_write_csv(const aht_sweep* sweep, const char* path) {
  AHT_REQUIRE(sweep);
  AHT_REQUIRE(path);
  return guarded([&] { aht::write_csv(sweep->result, path); });
}

void aht_sweep_free(aht_sweep* sweep) { delete sweep; }

size_t aht_verify_suite_name_count(void) { return aht::verify_suite_names().size(); }

const char* aht_verify_suite_name(size_t index) {
  const auto names = aht::verify_suite_names();
  return index < names.size() ? names[index].data() : nullptr;
}

aht_status aht_verify_run(const aht_config* config, const char* const* only, size_t only_count,
                          aht_verify_report** out) {
  AHT_REQUIRE(config);
  AHT_REQUIRE(out);
  if (only_count > 0 && only == nullptr) return fail(AHT_ERR_INVALID_ARGUMENT, "null argument: only");
  *out = nullptr;
  return guarded([&] {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < only_count; ++i) {
      if (only[i] == nullptr) throw aht::DomainError(fmt::format("null suite name at {}", i));
      names.emplace_back(only[i]);
    }
    *out = new aht_verify_report{aht::run_verify(config->doc.parse(), names)};
  });
}

int aht_verify_passed(const aht_verify_report* report) { return report != nullptr && report->report.passed(); }

size_t aht_verify_suite_count(const aht_verify_report* report) {
  return report == nullptr ? 0 : report->report.suites.size();
}

aht_status aht_verify_suite_at(const aht_verify_report* report, size_t index, aht_verify_suite* out) {
  AHT_REQUIRE(report);
  AHT_REQUIRE(out);
  const auto& suites = report->report.suites;
  if (index >= suites.size()) {
    return fail(AHT_ERR_NOT_FOUND, fmt::format("suite {} out of range ({} suites)", index, suites.size()));
  }
  const auto& s = suites[index];
  *out = aht_verify_suite{s.name.c_str(), s.passed ? 1 : 0, s.checked, s.failed, s.worst, s.summary.c_str()};
  g_last_error.clear();
  return AHT_OK;
}

aht_status aht_verify_to_json(const aht_verify_report* report, char** out) {
  AHT_REQUIRE(report);
  AHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = dup_string(report->report.to_json().dump(2)); });
}

void aht_verify_free(aht_verify_report* report) { delete report; }

aht_status aht_rate(const aht_config* config, aht_rate_info* out) {
  AHT_REQUIRE(config);
  AHT_REQUIRE(out);
  return guarded([&] {
    const auto cfg = config->doc.parse();
    cfg.validate();
    const auto palette = palette_of(cfg);
    const auto t2 = aht::theorem2_gap(cfg.model.normal, cfg.model.abnormal, palette, cfg.cells, cfg.probes);
    *out = aht_rate_info{t2.I_adhm, t2.I_chernoff, t2.gap, palette.size()};
  });
}

aht_status aht_analyze_json(const aht_config* config, char** out) {
  AHT_REQUIRE(config);
  AHT_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    const auto cfg = config->doc.parse();
    cfg.validate();
    const auto palette = palette_of(cfg);
    const auto& f = cfg.model.normal;
    const auto& g = cfg.model.abnormal;
    const auto rate = aht::rate_I_star(f, g, palette, cfg.cells, cfg.probes);
    const auto t2 = aht::theorem2_gap(f, g, palette, cfg.cells, cfg.probes);
    nlohmann::json levels = nlohmann::json::array();
    for (std::size_t d = 0; d < palette.size(); ++d) {
      levels.push_back({{"level", palette.levels[d]}, {"weight", palette.weights[d]}, {"I_d", rate.I_d[d]}});
    }
    nlohmann::json points = nlohmann::json::array();
    for (double v : cfg.neg_log_c) {
      const double c = std::exp(-v);
      points.push_back({{"neg_log_c", v}, {"predicted_delay", rate.predicted_delay(c)},
                        {"predicted_risk", rate.predicted_risk(c)}});
    }
    const nlohmann::json doc = {
        {"name", cfg.name},
        {"cells", cfg.cells},
        {"probes", cfg.probes},
        {"palette_source", cfg.model.oracle ? "config" : "state-revealing"},
        {"palette", levels},
        {"I_star", rate.I_star},
        {"I_chernoff", t2.I_chernoff},
        {"gap", t2.gap},
        {"kl_g_f", aht::kl_divergence(g, f).value},
        {"kl_f_g", aht::kl_divergence(f, g).value},
        {"predictions", points},
    };
    *out = dup_string(doc.dump(2));
  });
}

}  // extern "C"
