/* SPDX-FileCopyrightText: Copyright (c) 2026 The aht authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0 */

/* C interface of the anomaly-search library. Every handle is opaque and owned
 * by the caller once returned; release it with the matching *_free function.
 * Functions return an aht_status; on failure aht_last_error() describes the
 * problem for the calling thread until its next API call. Strings returned
 * through char** are heap-allocated and released with aht_string_free. */

#ifndef AHT_AHT_H
#define AHT_AHT_H

#include <stddef.h>
#include <stdint.h>

#if defined(AHT_BUILDING_LIBRARY)
#define AHT_API __attribute__((visibility("default")))
#else
#define AHT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aht_status {
  AHT_OK = 0,
  /* Null pointer, out-of-range index or a value outside the domain. */
  AHT_ERR_INVALID_ARGUMENT = 1,
  /* Config failed to parse or validate. */
  AHT_ERR_CONFIG = 2,
  AHT_ERR_IO = 3,
  /* Quadrature or summation missed its accuracy target. */
  AHT_ERR_NUMERIC = 4,
  /* Unknown policy label or index past the end. */
  AHT_ERR_NOT_FOUND = 5,
  AHT_ERR_INTERNAL = 6
} aht_status;

typedef struct aht_config aht_config;
typedef struct aht_sweep aht_sweep;
typedef struct aht_verify_report aht_verify_report;

AHT_API const char* aht_version(void);
AHT_API const char* aht_status_name(aht_status status);
/* Message of the last failed call on this thread; "" after a success. */
AHT_API const char* aht_last_error(void);
AHT_API void aht_string_free(char* text);

/* ---- presets ---- */

AHT_API size_t aht_preset_count(void);
/* Borrowed strings with static lifetime. */
AHT_API aht_status aht_preset_info(size_t index, const char** name, const char** summary);

/* ---- config ---- */

/* An existing file, else a preset name or alias. A missing file that is not
 * a preset name yields AHT_ERR_CONFIG with the path in the message. */
AHT_API aht_status aht_config_load(const char* path_or_preset, aht_config** out);
AHT_API aht_status aht_config_from_text(const char* text, aht_config** out);
/* `key=value` with a dotted key, e.g. "policies.1.p_th=0.5". */
AHT_API aht_status aht_config_set(aht_config* config, const char* assignment);
/* AHT_ERR_CONFIG lists every violated field, one per line. */
AHT_API aht_status aht_config_validate(const aht_config* config);
/* resolved != 0: the parsed config with every default filled in;
 * otherwise the document as written plus overrides. */
AHT_API aht_status aht_config_to_json(const aht_config* config, int resolved, char** out);
/* JSON text of one field of the resolved config, e.g. "name" or
 * "policies.0.label". AHT_ERR_NOT_FOUND if the path does not exist. */
AHT_API aht_status aht_config_get(const aht_config* config, const char* dotted_key, char** out);
AHT_API aht_status aht_config_policy_count(const aht_config* config, size_t* out);
/* Index of the policy with this label, or AHT_ERR_NOT_FOUND. */
AHT_API aht_status aht_config_find_policy(const aht_config* config, const char* label, size_t* out);
AHT_API void aht_config_free(aht_config* config);

/* ---- single trials ---- */

typedef struct aht_trial_result {
  uint64_t tau;
  size_t declared;
  size_t anomalous;
  int correct;
  uint64_t samples_taken;
  uint64_t idle_steps;
  int censored;
  uint64_t seed;
} aht_trial_result;

AHT_API uint64_t aht_trial_seed(uint64_t base_seed, size_t trial_index);
AHT_API aht_status aht_run_trial(const aht_config* config, size_t policy_index, double cost, uint64_t seed,
                                 aht_trial_result* out);

/* ---- sweeps ---- */

typedef struct aht_sweep_row {
  /* Borrowed from the sweep handle. */
  const char* policy;
  double cost;
  double neg_log_c;
  size_t trials;
  double avg_delay;
  double delay_ci_lo;
  double delay_ci_hi;
  double error_rate;
  double err_ci_lo;
  double err_ci_hi;
  double bayes_risk;
  /* Zero for rows read back from CSV. */
  double risk_ci_lo;
  double risk_ci_hi;
  double avg_samples;
  double avg_idle;
  /* error_rate + cost * avg_samples + gamma * avg_idle; zero from CSV. */
  double sampling_risk;
  double censored_frac;
  uint64_t base_seed;
} aht_sweep_row;

/* Called from the driving thread after each finished (policy, cost) cell. */
typedef void (*aht_progress_fn)(size_t done, size_t total, void* user);

/* workers == 0 falls back to AHT_WORKERS, then the hardware concurrency. */
AHT_API aht_status aht_sweep_run(const aht_config* config, unsigned workers, aht_progress_fn progress, void* user,
                                 aht_sweep** out);
AHT_API aht_status aht_sweep_read_csv(const char* path, aht_sweep** out);
AHT_API size_t aht_sweep_row_count(const aht_sweep* sweep);
AHT_API aht_status aht_sweep_row_at(const aht_sweep* sweep, size_t index, aht_sweep_row* out);
AHT_API aht_status aht_sweep_to_csv(const aht_sweep* sweep, char** out);
AHT_API aht_status aht_sweep_write_csv(const aht_sweep* sweep, const char* path);
AHT_API void aht_sweep_free(aht_sweep* sweep);

/* ---- verification ---- */

typedef struct aht_verify_suite {
  /* Borrowed from the report handle. */
  const char* name;
  int passed;
  size_t checked;
  size_t failed;
  double worst;
  const char* summary;
} aht_verify_suite;

AHT_API size_t aht_verify_suite_name_count(void);
AHT_API const char* aht_verify_suite_name(size_t index);
/* Runs the named suites, or all of them when only_count is 0. An unknown
 * name yields AHT_ERR_CONFIG. A failing suite is not an error: check
 * aht_verify_passed. */
AHT_API aht_status aht_verify_run(const aht_config* config, const char* const* only, size_t only_count,
                                  aht_verify_report** out);
AHT_API int aht_verify_passed(const aht_verify_report* report);
AHT_API size_t aht_verify_suite_count(const aht_verify_report* report);
AHT_API aht_status aht_verify_suite_at(const aht_verify_report* report, size_t index, aht_verify_suite* out);
/* Full report including every failing instance. */
AHT_API aht_status aht_verify_to_json(const aht_verify_report* report, char** out);
AHT_API void aht_verify_free(aht_verify_report* report);

/* ---- analysis ---- */

typedef struct aht_rate_info {
  /* Rate under ADHM with the config's palette (or the state-revealing
   * palette of its chain when none is set). */
  double I_star;
  /* Rate of the same marginal mixture treated as one i.i.d. law. */
  double I_chernoff;
  double gap;
  size_t levels;
} aht_rate_info;

AHT_API aht_status aht_rate(const aht_config* config, aht_rate_info* out);
/* Per-level rates, predicted delay and risk at every sweep point, and the
 * rate gap, as JSON. */
AHT_API aht_status aht_analyze_json(const aht_config* config, char** out);

#ifdef __cplusplus
}
#endif

#endif /* AHT_AHT_H */
