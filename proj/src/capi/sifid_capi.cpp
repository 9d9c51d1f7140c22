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

#include "sifid/sifid.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "cache.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "filtering.hpp"
#include "judge.hpp"
#include "prompting.hpp"
#include "scorer.hpp"
#include "segmentation.hpp"

using json = nlohmann::json;

struct sifid_pipeline {
  sifid::PipelineConfig cfg;
  std::optional<sifid::PromptTemplate> custom_template;
  sifid::SentenceSplitter splitter;
  std::unique_ptr<sifid::HttpScorerBackend> scorer;
  std::unique_ptr<sifid::JudgeBackend> judge;
  sifid::HttpJudgeBackend* http_judge = nullptr;
  std::unique_ptr<sifid::Cache> cache;
  json resolved;

  const sifid::PromptTemplate& prompt_template() const {
    return custom_template ? *custom_template
                           : sifid::PromptTemplate::builtin(cfg.template_id.base);
  }

  sifid::Backends backends() {
    return sifid::Backends{scorer.get(), judge.get(), cache.get(), &prompt_template(), &splitter};
  }
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

sifid_status fail(sifid_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
sifid_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SIFID_OK;
  } catch (const sifid::Error& e) {
    return fail(static_cast<sifid_status>(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(SIFID_ERR_CONFIG, std::string("invalid JSON: ") + e.what());
  } catch (const std::exception& e) {
    return fail(SIFID_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SIFID_ERR_INTERNAL, "unknown failure");
  }
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> kKeys = {
      "scorer",        "scorer_url",       "scorer_token",        "scorer_model",
      "batch_size",    "scorer_in_flight", "beta",                "window",
      "empty_fallback", "template",        "cot",                 "template_file",
      "abbreviations_file", "judge_url",   "judge_token",         "judge_model",
      "temperature",   "max_tokens",       "retries",             "timeout",
      "backoff_ms",    "unparseable",      "judge_mock_response", "judge_mock_rules",
      "judge_mock_rules_json", "cache_dir", "concurrency",        "limit",
      "max_error_rate"};
  return kKeys;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw sifid::Error(sifid::ErrorCode::kConfig, std::string("config key '") + key +
                                                      "' has the wrong type");
  }
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback, std::size_t min) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_number_integer() || it->get<long long>() < static_cast<long long>(min)) {
    throw sifid::Error(sifid::ErrorCode::kConfig, std::string("config key '") + key +
                                                      "' must be an integer >= " +
                                                      std::to_string(min));
  }
  return it->get<std::size_t>();
}

std::unique_ptr<sifid_pipeline> build_pipeline(const json& j) {
  if (!j.is_object()) throw sifid::Error(sifid::ErrorCode::kConfig, "config must be an object");
  for (const auto& item : j.items()) {
    if (!known_keys().contains(item.key())) {
      throw sifid::Error(sifid::ErrorCode::kConfig, "unknown config key '" + item.key() + "'");
    }
  }
  auto p = std::make_unique<sifid_pipeline>();
  sifid::PipelineConfig& cfg = p->cfg;

  const std::string scorer_name = get_or<std::string>(j, "scorer", "none");
  if (scorer_name != "none") {
    const auto variant = sifid::parse_scorer_variant(scorer_name);
    std::string model = variant == sifid::ScorerVariant::kMock
                            ? "mock"
                            : get_or<std::string>(j, "scorer_model", "default");
    cfg.scorer = sifid::ScorerKind{variant, model};
    if (variant != sifid::ScorerVariant::kMock) {
      const std::string url = get_or<std::string>(j, "scorer_url", "");
      if (url.empty()) {
        throw sifid::Error(sifid::ErrorCode::kConfig,
                           "scorer '" + scorer_name +
                               "' needs an endpoint (--scorer-url or SIFID_SCORER_URL)");
      }
      sifid::EndpointConfig endpoint;
      endpoint.base_url = url;
      endpoint.bearer_token = get_or<std::string>(j, "scorer_token", "");
      endpoint.timeout = std::chrono::seconds(get_count(j, "timeout", 60, 1));
      endpoint.retry.retry_budget = static_cast<int>(get_count(j, "retries", 3, 0));
      endpoint.retry.base_backoff = std::chrono::milliseconds(get_count(j, "backoff_ms", 500, 0));
      p->scorer = std::make_unique<sifid::HttpScorerBackend>(std::move(endpoint));
    }
  }
  cfg.scorer_options.batch_size = get_count(j, "batch_size", 64, 1);
  cfg.scorer_options.max_in_flight = get_count(j, "scorer_in_flight", 4, 1);

  const double beta_default =
      cfg.scorer ? sifid::default_beta(cfg.scorer->variant) : 0.0;
  cfg.filter.beta = get_or<double>(j, "beta", beta_default);
  cfg.filter.window_radius = get_count(j, "window", 1, 0);
  const std::string fallback = get_or<std::string>(j, "empty_fallback", "full");
  if (fallback == "full") {
    cfg.filter.empty_fallback = sifid::EmptyFallback::kFullDocument;
  } else if (fallback == "error") {
    cfg.filter.empty_fallback = sifid::EmptyFallback::kEmptyError;
  } else {
    throw sifid::Error(sifid::ErrorCode::kConfig, "empty_fallback must be 'full' or 'error'");
  }

  cfg.template_id.base = sifid::parse_template_base(get_or<std::string>(j, "template", "generic"));
  cfg.template_id.cot = get_or<bool>(j, "cot", false);
  if (auto path = get_or<std::string>(j, "template_file", ""); !path.empty()) {
    p->custom_template = sifid::PromptTemplate::from_file(path);
  }
  if (auto path = get_or<std::string>(j, "abbreviations_file", ""); !path.empty()) {
    p->splitter = sifid::SentenceSplitter::from_file(path);
  }

  sifid::JudgeConfig& judge = cfg.judge;
  judge.endpoint_url = get_or<std::string>(j, "judge_url", "");
  judge.api_token = get_or<std::string>(j, "judge_token", "");
  judge.model = get_or<std::string>(j, "judge_model", judge.model);
  judge.temperature = get_or<double>(j, "temperature", 0.0);
  judge.max_output_tokens = static_cast<int>(get_count(j, "max_tokens", 512, 1));
  judge.retry_budget = static_cast<int>(get_count(j, "retries", 3, 0));
  judge.timeout = std::chrono::seconds(get_count(j, "timeout", 60, 1));
  judge.base_backoff = std::chrono::milliseconds(get_count(j, "backoff_ms", 500, 0));
  judge.unparseable =
      sifid::parse_unparseable_policy(get_or<std::string>(j, "unparseable", "inconsistent"));
  sifid::validate(judge);

  const auto mock_rules_path = get_or<std::string>(j, "judge_mock_rules", "");
  const auto mock_rules_json = get_or<std::string>(j, "judge_mock_rules_json", "");
  if (!mock_rules_path.empty()) {
    p->judge = sifid::MockJudgeBackend::from_file(mock_rules_path);
  } else if (!mock_rules_json.empty()) {
    p->judge = sifid::MockJudgeBackend::from_json(mock_rules_json);
  } else if (j.contains("judge_mock_response") && !j["judge_mock_response"].is_null()) {
    p->judge = std::make_unique<sifid::MockJudgeBackend>(
        get_or<std::string>(j, "judge_mock_response", ""));
  } else if (!judge.endpoint_url.empty()) {
    auto http = std::make_unique<sifid::HttpJudgeBackend>(judge);
    p->http_judge = http.get();
    p->judge = std::move(http);
  }

  if (auto dir = get_or<std::string>(j, "cache_dir", ""); !dir.empty()) {
    p->cache = std::make_unique<sifid::Cache>(dir);
  }
  cfg.concurrency = get_count(j, "concurrency", 4, 1);
  if (j.contains("limit") && !j["limit"].is_null()) cfg.limit = get_count(j, "limit", 0, 1);
  cfg.max_error_rate = get_or<double>(j, "max_error_rate", 0.5);
  if (!(cfg.max_error_rate >= 0.0 && cfg.max_error_rate <= 1.0)) {
    throw sifid::Error(sifid::ErrorCode::kConfig, "max_error_rate must lie in [0, 1]");
  }

  p->resolved = {
      {"scorer", scorer_name},
      {"scorer_model", cfg.scorer ? json(cfg.scorer->model_id) : json(nullptr)},
      {"beta", cfg.filter.beta},
      {"window", cfg.filter.window_radius},
      {"empty_fallback", fallback},
      {"template", sifid::template_base_name(cfg.template_id.base)},
      {"cot", cfg.template_id.cot},
      {"custom_template", p->custom_template.has_value()},
      {"judge", p->judge ? json(p->judge->identity()) : json(nullptr)},
      {"judge_model", judge.model},
      {"temperature", judge.temperature},
      {"max_tokens", judge.max_output_tokens},
      {"retries", judge.retry_budget},
      {"unparseable", judge.unparseable == sifid::UnparseablePolicy::kInconsistent
                          ? "inconsistent"
                          : "consistent"},
      {"cache_dir", p->cache ? json(p->cache->root().string()) : json(nullptr)},
      {"concurrency", cfg.concurrency},
      {"limit", cfg.limit ? json(*cfg.limit) : json(nullptr)},
  };
  return p;
}

void require(const void* ptr, const char* what) {
  if (!ptr) throw sifid::Error(sifid::ErrorCode::kInvalidInput, std::string(what) + " is NULL");
}

struct Prepared {
  sifid::SentenceDoc doc;
  sifid::SentenceDoc summary;
};

Prepared prepare(const sifid_pipeline& p, const char* document, const char* summary) {
  require(document, "document");
  require(summary, "summary");
  Prepared out{p.splitter.split(document), p.splitter.split(summary)};
  if (out.doc.empty()) throw sifid::Error(sifid::ErrorCode::kInvalidInput, "document is empty");
  if (out.summary.empty()) throw sifid::Error(sifid::ErrorCode::kInvalidInput, "summary is empty");
  return out;
}

sifid::RelevanceMatrix matrix_for(sifid_pipeline& p, const Prepared& in) {
  if (!p.cfg.scorer) throw sifid::Error(sifid::ErrorCode::kConfig, "no scorer selected");
  return sifid::build_relevance_matrix(in.doc, in.summary, *p.cfg.scorer, p.scorer.get(),
                                       p.cache.get(), p.cfg.scorer_options);
}

json verdict_json(const sifid::Verdict& v) {
  return {{"label", sifid::verdict_label_name(v.label)},
          {"matched_token", v.matched_token ? json(*v.matched_token) : json(nullptr)},
          {"match_position", v.match_position ? json(*v.match_position) : json(nullptr)},
          {"raw", v.raw}};
}

}  // namespace

extern "C" {

const char* sifid_version(void) { return SIFID_VERSION; }

const char* sifid_last_error(void) { return g_last_error.c_str(); }

const char* sifid_status_name(sifid_status status) {
  if (status == SIFID_ERR_INTERNAL) return "internal error";
  // Every name is a string literal, so the view is NUL-terminated.
  return sifid::error_code_name(static_cast<sifid::ErrorCode>(status)).data();
}

void sifid_string_free(char* s) { std::free(s); }

sifid_status sifid_pipeline_create(const char* config_json, sifid_pipeline** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    json j = config_json && *config_json ? json::parse(config_json) : json::object();
    *out = build_pipeline(j).release();
  });
}

void sifid_pipeline_destroy(sifid_pipeline* pipeline) { delete pipeline; }

sifid_status sifid_pipeline_describe(const sifid_pipeline* pipeline, char** out_json) {
  return guarded([&] {
    require(pipeline, "pipeline");
    require(out_json, "out_json");
    *out_json = dup_string(pipeline->resolved.dump());
  });
}

sifid_status sifid_split(const sifid_pipeline* pipeline, const char* text, char** out_json) {
  return guarded([&] {
    require(pipeline, "pipeline");
    require(text, "text");
    require(out_json, "out_json");
    const sifid::SentenceDoc doc = pipeline->splitter.split(text);
    json sentences = json::array();
    for (const auto& s : doc.sentences) {
      sentences.push_back(
          {{"index", s.index}, {"text", s.text}, {"begin", s.span.begin}, {"end", s.span.end}});
    }
    *out_json = dup_string(json{{"sentences", sentences}, {"warnings", doc.warnings}}.dump(
        -1, ' ', false, json::error_handler_t::replace));
  });
}

sifid_status sifid_matrix(sifid_pipeline* pipeline, const char* document, const char* summary,
                          char** out_json) {
  return guarded([&] {
    require(pipeline, "pipeline");
    require(out_json, "out_json");
    const Prepared in = prepare(*pipeline, document, summary);
    const sifid::RelevanceMatrix matrix = matrix_for(*pipeline, in);
    const sifid::PooledScores pooled = sifid::max_pool_rows(matrix);
    json rows = json::array();
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
      const auto row = matrix.row(i);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    json out = {{"rows", matrix.rows()},
                {"cols", matrix.cols()},
                {"scorer", sifid::scorer_variant_name(matrix.kind().variant)},
                {"model", matrix.kind().model_id},
                {"matrix", rows},
                {"pooled", pooled.values},
                {"beta", pipeline->cfg.filter.beta},
                {"window", pipeline->cfg.filter.window_radius},
                {"kept_indices", sifid::select_indices(pooled, pipeline->cfg.filter)}};
    *out_json = dup_string(out.dump());
  });
}

sifid_status sifid_filter(sifid_pipeline* pipeline, const char* document, const char* summary,
                          char** out_json) {
  return guarded([&] {
    require(pipeline, "pipeline");
    require(out_json, "out_json");
    const Prepared in = prepare(*pipeline, document, summary);
    sifid::FilteredDocument filtered;
    if (pipeline->cfg.scorer) {
      const sifid::PooledScores pooled = sifid::max_pool_rows(matrix_for(*pipeline, in));
      filtered = sifid::assemble_filtered(
          in.doc, sifid::select_indices(pooled, pipeline->cfg.filter), pipeline->cfg.filter);
    } else {
      filtered = sifid::unfiltered(in.doc);
    }
    json out = {{"document_sentences", in.doc.size()},
                {"kept_indices", filtered.kept_indices},
                {"removal_rate", filtered.removal_rate},
                {"fallback_used", filtered.fallback_used},
                {"beta", pipeline->cfg.filter.beta},
                {"scorer", pipeline->resolved["scorer"]},
                {"text", filtered.text}};
    *out_json = dup_string(out.dump(-1, ' ', false, json::error_handler_t::replace));
  });
}

sifid_status sifid_render(const sifid_pipeline* pipeline, const char* article,
                          const char* summary, char** out_text) {
  return guarded([&] {
    require(pipeline, "pipeline");
    require(article, "article");
    require(summary, "summary");
    require(out_text, "out_text");
    *out_text = dup_string(
        pipeline->prompt_template().render(pipeline->cfg.template_id, article, summary).text);
  });
}

sifid_status sifid_detect(sifid_pipeline* pipeline, const char* document, const char* summary,
                          char** out_json) {
  return guarded([&] {
    require(pipeline, "pipeline");
    require(document, "document");
    require(summary, "summary");
    require(out_json, "out_json");
    if (!pipeline->judge) {
      throw sifid::Error(sifid::ErrorCode::kConfig,
                         "no judge configured (set --judge-url / SIFID_JUDGE_URL or a mock judge)");
    }
    sifid::Example example;
    example.id = "single";
    example.benchmark = "custom";
    example.document = document;
    example.summary = summary;
    if (auto violations = sifid::validate_example(example); !violations.empty()) {
      throw sifid::Error(sifid::ErrorCode::kInvalidInput, violations.front());
    }
    const sifid::ExampleResult r = sifid::detect(example, pipeline->cfg, pipeline->backends());
    if (r.errored()) throw sifid::Error(*r.error_code, r.error);
    json out = json::parse(sifid::result_to_json(r));
    out["verdict"] = verdict_json(r.verdict);
    *out_json = dup_string(out.dump());
  });
}

sifid_status sifid_evaluate(sifid_pipeline* pipeline, const char* dataset_path,
                            const char* benchmark, const char* split, const char* run_dir,
                            const char* command_line, char** out_json) {
  return guarded([&] {
    require(pipeline, "pipeline");
    require(dataset_path, "dataset_path");
    require(benchmark, "benchmark");
    require(split, "split");
    require(out_json, "out_json");
    *out_json = nullptr;
    if (!pipeline->judge) {
      throw sifid::Error(sifid::ErrorCode::kConfig,
                         "no judge configured (set --judge-url / SIFID_JUDGE_URL or a mock judge)");
    }
    sifid::LoadResult loaded =
        sifid::load_dataset(dataset_path, benchmark, sifid::parse_split(split));
    sifid::RunOptions options;
    if (run_dir && *run_dir) options.run_dir = run_dir;
    options.command_line = command_line ? command_line : "";
    options.rejects = loaded.rejects;

    auto summarize = [&](const sifid::EvalRun& run) {
      json out = {{"report", json::parse(sifid::report_to_json(run.report))},
                  {"table", sifid::format_report_table(run.report)},
                  {"rejects", loaded.rejects.size()},
                  {"run_dir", options.run_dir ? json(options.run_dir->string()) : json(nullptr)}};
      return dup_string(out.dump());
    };
    try {
      const sifid::EvalRun run =
          sifid::evaluate(loaded.dataset, pipeline->cfg, pipeline->backends(), options);
      *out_json = summarize(run);
    } catch (const sifid::RunFailed& e) {
      *out_json = summarize(e.run());
      throw;
    }
  });
}

sifid_status sifid_stats(const sifid_pipeline* pipeline, char** out_json) {
  return guarded([&] {
    require(pipeline, "pipeline");
    require(out_json, "out_json");
    json out = {
        {"judge_calls", pipeline->judge ? pipeline->judge->calls() : 0},
        {"judge_retries", pipeline->http_judge ? pipeline->http_judge->endpoint().retries() : 0},
        {"scorer_requests", pipeline->scorer ? pipeline->scorer->endpoint().requests() : 0},
        {"scorer_retries", pipeline->scorer ? pipeline->scorer->endpoint().retries() : 0},
        {"cache", nullptr}};
    if (pipeline->cache) {
      const sifid::CacheStats s = pipeline->cache->stats();
      out["cache"] = {{"hits", s.hits},
                      {"misses", s.misses},
                      {"writes", s.writes},
                      {"write_failures", s.write_failures},
                      {"corrupt", s.corrupt}};
    }
    *out_json = dup_string(out.dump());
  });
}

sifid_status sifid_parse_verdict(const char* raw, char** out_json) {
  return guarded([&] {
    require(raw, "raw");
    require(out_json, "out_json");
    *out_json = dup_string(
        verdict_json(sifid::parse_verdict(raw)).dump(-1, ' ', false, json::error_handler_t::replace));
  });
}

sifid_status sifid_cache_clear(const char* cache_dir, size_t* removed) {
  return guarded([&] {
    require(cache_dir, "cache_dir");
    sifid::Cache cache(cache_dir);
    const std::size_t n = cache.clear();
    if (removed) *removed = n;
  });
}

}  // extern "C"
