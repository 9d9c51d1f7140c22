// Copyright 2026 The SIFiD Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the SIFiD summary-consistency pipeline.
 *
 * All functions are thread-compatible: distinct pipelines may be used from
 * distinct threads freely, and one pipeline may serve concurrent calls to
 * the scoring and judging entry points. Strings returned through `char**`
 * out-parameters are owned by the caller and released with
 * sifid_string_free(). Structured results are UTF-8 JSON documents.
 *
 * On failure a function returns a non-zero sifid_status and
 * sifid_last_error() describes the failure for the calling thread.
 */
#ifndef SIFID_SIFID_H_
#define SIFID_SIFID_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(SIFID_BUILDING_LIBRARY)
#define SIFID_API __attribute__((visibility("default")))
#else
#define SIFID_API
#endif

typedef enum sifid_status {
  SIFID_OK = 0,
  SIFID_ERR_CONFIG = 1,
  SIFID_ERR_TRANSPORT = 2,
  SIFID_ERR_PROTOCOL = 3,
  SIFID_ERR_DATASET = 4,
  SIFID_ERR_SCORING = 5,
  SIFID_ERR_EMPTY_FILTER = 6,
  SIFID_ERR_RENDER = 7,
  SIFID_ERR_UNDEFINED_METRIC = 8,
  SIFID_ERR_JUDGE = 9,
  SIFID_ERR_IO = 10,
  SIFID_ERR_INVALID_INPUT = 11,
  SIFID_ERR_RUN_FAILED = 12,
  SIFID_ERR_INTERNAL = 99
} sifid_status;

typedef struct sifid_pipeline sifid_pipeline;

SIFID_API const char* sifid_version(void);

/* Message for the last failed call on this thread; never NULL. */
SIFID_API const char* sifid_last_error(void);

SIFID_API const char* sifid_status_name(sifid_status status);

SIFID_API void sifid_string_free(char* s);

/*
 * Creates a pipeline from a JSON object; NULL or "{}" selects every default.
 * Recognised keys:
 *
 *   scorer            "entailment" | "similarity" | "mock" | "none"
 *   scorer_url, scorer_token, scorer_model, batch_size, scorer_in_flight
 *   beta              default 0.0 (entailment, mock) or 0.5 (similarity)
 *   window            context radius around kept sentences, default 1
 *   empty_fallback    "full" | "error"
 *   template          "generic" | "polytope"
 *   cot               boolean
 *   template_file     overrides the built-in template text
 *   abbreviations_file
 *   judge_url, judge_token, judge_model, temperature, max_tokens,
 *   retries, timeout, backoff_ms, unparseable ("inconsistent"|"consistent")
 *   judge_mock_response, judge_mock_rules (path), judge_mock_rules_json
 *   cache_dir, concurrency, limit, max_error_rate
 *
 * Unknown keys are rejected with SIFID_ERR_CONFIG.
 */
SIFID_API sifid_status sifid_pipeline_create(const char* config_json, sifid_pipeline** out);
SIFID_API void sifid_pipeline_destroy(sifid_pipeline* pipeline);

/* Resolved configuration, including the effective beta. */
SIFID_API sifid_status sifid_pipeline_describe(const sifid_pipeline* pipeline, char** out_json);

/* {"sentences": [{"index","text","begin","end"}...], "warnings": [...]} */
SIFID_API sifid_status sifid_split(const sifid_pipeline* pipeline, const char* text,
                                   char** out_json);

/* Relevance matrix, pooled scores and the selected indices. Needs a scorer. */
SIFID_API sifid_status sifid_matrix(sifid_pipeline* pipeline, const char* document,
                                    const char* summary, char** out_json);

/* Filtered document: kept_indices, removal_rate, fallback_used, text. */
SIFID_API sifid_status sifid_filter(sifid_pipeline* pipeline, const char* document,
                                    const char* summary, char** out_json);

/* The judge prompt for an article/summary pair. */
SIFID_API sifid_status sifid_render(const sifid_pipeline* pipeline, const char* article,
                                    const char* summary, char** out_text);

/* Full pipeline for one pair; the result record includes the verdict. */
SIFID_API sifid_status sifid_detect(sifid_pipeline* pipeline, const char* document,
                                    const char* summary, char** out_json);

/*
 * Evaluates a line-delimited dataset file. `run_dir` may be NULL.
 * Output: {"report": {...}, "table": "...", "rejects": n, "run_dir": ...}.
 * On SIFID_ERR_RUN_FAILED, *out_json still receives the partial report.
 */
SIFID_API sifid_status sifid_evaluate(sifid_pipeline* pipeline, const char* dataset_path,
                                      const char* benchmark, const char* split,
                                      const char* run_dir, const char* command_line,
                                      char** out_json);

/* Backend call, retry and cache counters accumulated by this pipeline. */
SIFID_API sifid_status sifid_stats(const sifid_pipeline* pipeline, char** out_json);

SIFID_API sifid_status sifid_parse_verdict(const char* raw, char** out_json);

/* Removes every cache entry under `cache_dir`. `removed` may be NULL. */
SIFID_API sifid_status sifid_cache_clear(const char* cache_dir, size_t* removed);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // SIFID_SIFID_H_
