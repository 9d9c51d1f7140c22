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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "filtering.hpp"
#include "judge.hpp"
#include "prompting.hpp"
#include "scorer.hpp"
#include "segmentation.hpp"

namespace sifid {

class Cache;

struct PipelineConfig {
  // nullopt runs the unfiltered baseline: the whole document goes to the judge.
  std::optional<ScorerKind> scorer;
  FilterConfig filter;
  TemplateId template_id;
  JudgeConfig judge;
  ScorerOptions scorer_options;
  std::size_t concurrency = 4;
  std::optional<std::size_t> limit;
  double max_error_rate = 0.5;
};

// Everything detect() talks to. Null members fall back to: no scorer
// endpoint, no cache, the built-in template for the configured base and the
// default splitter. A judge backend is required.
struct Backends {
  ScorerBackend* scorer = nullptr;
  JudgeBackend* judge = nullptr;
  Cache* cache = nullptr;
  const PromptTemplate* prompt_template = nullptr;
  const SentenceSplitter* splitter = nullptr;
};

struct ExampleResult {
  std::string id;
  std::optional<int> gold;
  std::optional<int> predicted;  // unset when errored
  Verdict verdict;
  std::size_t document_sentences = 0;
  std::vector<std::size_t> kept_indices;
  double removal_rate = 0.0;
  bool fallback_used = false;
  std::optional<long long> prompt_tokens;
  std::optional<long long> completion_tokens;
  bool tokens_estimated = false;
  bool judge_cached = false;
  int retries = 0;
  double wall_time = 0.0;  // seconds
  std::optional<ErrorCode> error_code;
  std::string error;

  bool errored() const { return error_code.has_value(); }
};

struct EvalReport {
  std::string benchmark;
  std::string split;
  std::string fingerprint;
  std::size_t n_examples = 0;
  std::size_t n_labeled = 0;  // non-errored examples with a gold label
  std::optional<double> balanced_accuracy;
  std::optional<double> tpr;
  std::optional<double> tnr;
  std::optional<double> mean_removal_rate;
  std::size_t unparseable_count = 0;
  std::size_t error_count = 0;
  std::size_t unlabeled_count = 0;
  std::size_t fallback_count = 0;
  long long total_prompt_tokens = 0;
  std::size_t estimated_token_examples = 0;
  std::string metric_note;
};

struct EvalRun {
  EvalReport report;
  std::vector<ExampleResult> results;  // sorted by id
};

// Raised when the error rate exceeds PipelineConfig::max_error_rate. The
// partial run has already been written to the run directory.
class RunFailed : public Error {
 public:
  RunFailed(const std::string& message, EvalRun run)
      : Error(ErrorCode::kRunFailed, message), run_(std::move(run)) {}
  const EvalRun& run() const { return run_; }

 private:
  EvalRun run_;
};

struct Confusion {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
};

// Positive class is consistent (1). Throws Error(kInvalidInput) for length
// mismatches or non-binary values.
Confusion confusion(std::span<const int> golds, std::span<const int> preds);

// (TP/(TP+FN) + TN/(TN+FP)) / 2. Throws Error(kUndefinedMetric) unless golds
// contain both classes.
double balanced_accuracy(std::span<const int> golds, std::span<const int> preds);

// Split, score, pool, filter, render, judge and parse one example. Stage
// failures are recorded on the result rather than thrown.
ExampleResult detect(const Example& example, const PipelineConfig& cfg, const Backends& backends);

// Digest of everything that can change a reported number: scorer, filter,
// template bytes, judge model and decoding parameters, judge backend
// identity and the example limit.
std::string config_fingerprint(const PipelineConfig& cfg, const PromptTemplate& tmpl,
                               const std::string& judge_identity);

struct RunOptions {
  std::optional<std::filesystem::path> run_dir;
  std::string command_line;
  std::vector<Reject> rejects;
};

// Runs detect over the dataset (or its first `limit` examples) with at most
// cfg.concurrency examples in flight, then aggregates in id order. With a
// run directory, writes manifest.json before the first backend call, then
// results.jsonl, rejects.jsonl and report.json.
EvalRun evaluate(const Dataset& dataset, const PipelineConfig& cfg, const Backends& backends,
                 const RunOptions& options = {});

std::string report_to_json(const EvalReport& report);
std::string result_to_json(const ExampleResult& result);
std::string format_report_table(const EvalReport& report);

}  // namespace sifid
