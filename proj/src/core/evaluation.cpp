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

#include "evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "cache.hpp"
#include "hashing.hpp"
#include "parallel.hpp"

namespace sifid {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string trimmed(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(first, last - first + 1));
}

long long whitespace_tokens(std::string_view text) {
  long long n = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json config_json(const PipelineConfig& cfg, const PromptTemplate& tmpl,
                 const std::string& judge_identity) {
  json scorer = nullptr;
  if (cfg.scorer) {
    scorer = {{"variant", scorer_variant_name(cfg.scorer->variant)},
              {"model", cfg.scorer->model_id}};
  }
  return {
      {"scorer", scorer},
      {"filter",
       {{"beta", cfg.filter.beta},
        {"window_radius", cfg.filter.window_radius},
        {"empty_fallback", cfg.filter.empty_fallback == EmptyFallback::kFullDocument
                               ? "full_document"
                               : "error"}}},
      {"template",
       {{"base", template_base_name(cfg.template_id.base)},
        {"cot", cfg.template_id.cot},
        {"sha256", sha256_hex(tmpl.body())}}},
      {"judge",
       {{"model", cfg.judge.model},
        {"temperature", cfg.judge.temperature},
        {"max_tokens", cfg.judge.max_output_tokens},
        {"unparseable", cfg.judge.unparseable == UnparseablePolicy::kInconsistent
                            ? "inconsistent"
                            : "consistent"},
        {"backend", judge_identity}}},
      {"limit", cfg.limit ? json(*cfg.limit) : json(nullptr)},
  };
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

Confusion confusion(std::span<const int> golds, std::span<const int> preds) {
  if (golds.size() != preds.size()) {
    throw Error(ErrorCode::kInvalidInput, "labels and predictions differ in length");
  }
  Confusion c;
  for (std::size_t k = 0; k < golds.size(); ++k) {
    const int g = golds[k];
    const int p = preds[k];
    if ((g != 0 && g != 1) || (p != 0 && p != 1)) {
      throw Error(ErrorCode::kInvalidInput, "labels and predictions must be 0 or 1");
    }
    if (g == 1) {
      (p == 1 ? c.tp : c.fn) += 1;
    } else {
      (p == 0 ? c.tn : c.fp) += 1;
    }
  }
  return c;
}

double balanced_accuracy(std::span<const int> golds, std::span<const int> preds) {
  if (golds.empty()) throw Error(ErrorCode::kUndefinedMetric, "balanced accuracy of no examples");
  const Confusion c = confusion(golds, preds);
  if (c.tp + c.fn == 0 || c.tn + c.fp == 0) {
    throw Error(ErrorCode::kUndefinedMetric,
                "balanced accuracy needs both consistent and inconsistent gold labels");
  }
  const double tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const double tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  return (tpr + tnr) / 2.0;
}

ExampleResult detect(const Example& example, const PipelineConfig& cfg, const Backends& backends) {
  const auto started = std::chrono::steady_clock::now();
  ExampleResult r;
  r.id = example.id;
  r.gold = example.gold_label;
  try {
    if (!backends.judge) throw Error(ErrorCode::kConfig, "no judge configured");
    static const SentenceSplitter kDefaultSplitter;
    const SentenceSplitter& splitter = backends.splitter ? *backends.splitter : kDefaultSplitter;
    const PromptTemplate& tmpl = backends.prompt_template
                                     ? *backends.prompt_template
                                     : PromptTemplate::builtin(cfg.template_id.base);

    const SentenceDoc doc = splitter.split(example.document);
    if (doc.empty()) throw Error(ErrorCode::kInvalidInput, "document has no sentences");
    r.document_sentences = doc.size();

    std::string article;
    if (cfg.scorer) {
      const SentenceDoc summary = splitter.split(example.summary);
      if (summary.empty()) throw Error(ErrorCode::kInvalidInput, "summary has no sentences");
      const RelevanceMatrix matrix = build_relevance_matrix(
          doc, summary, *cfg.scorer, backends.scorer, backends.cache, cfg.scorer_options);
      const PooledScores pooled = max_pool_rows(matrix);
      FilteredDocument filtered =
          assemble_filtered(doc, select_indices(pooled, cfg.filter), cfg.filter);
      r.kept_indices = std::move(filtered.kept_indices);
      r.removal_rate = filtered.removal_rate;
      r.fallback_used = filtered.fallback_used;
      article = std::move(filtered.text);
    } else {
      for (const auto& s : doc.sentences) r.kept_indices.push_back(s.index);
      article = trimmed(example.document);
    }

    const RenderedPrompt prompt = tmpl.render(cfg.template_id, article, trimmed(example.summary));
    JudgeReply reply = query_judge(prompt, cfg.judge, *backends.judge, backends.cache);
    r.judge_cached = reply.from_cache;
    r.retries = reply.retries;
    r.completion_tokens = reply.completion_tokens;
    if (reply.prompt_tokens) {
      r.prompt_tokens = reply.prompt_tokens;
    } else {
      r.prompt_tokens = whitespace_tokens(prompt.text);
      r.tokens_estimated = true;
    }
    r.verdict = parse_verdict(reply.text);
    r.predicted = predicted_label(r.verdict, cfg.judge.unparseable);
  } catch (const Error& e) {
    r.error_code = e.code();
    r.error = e.what();
  } catch (const std::exception& e) {
    r.error_code = ErrorCode::kInvalidInput;
    r.error = e.what();
  }
  r.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

std::string config_fingerprint(const PipelineConfig& cfg, const PromptTemplate& tmpl,
                               const std::string& judge_identity) {
  return sha256_hex(config_json(cfg, tmpl, judge_identity).dump());
}

EvalRun evaluate(const Dataset& dataset, const PipelineConfig& cfg, const Backends& backends,
                 const RunOptions& options) {
  if (dataset.examples.empty()) throw Error(ErrorCode::kDataset, "dataset is empty");
  if (!backends.judge) throw Error(ErrorCode::kConfig, "no judge configured");
  validate(cfg.judge);
  if (cfg.scorer && cfg.scorer->variant != ScorerVariant::kMock && !backends.scorer) {
    throw Error(ErrorCode::kConfig, "no scorer endpoint configured");
  }

  const PromptTemplate& tmpl = backends.prompt_template
                                   ? *backends.prompt_template
                                   : PromptTemplate::builtin(cfg.template_id.base);
  const std::string judge_identity = backends.judge->identity();
  const std::string fingerprint = config_fingerprint(cfg, tmpl, judge_identity);

  const std::size_t n = std::min(dataset.examples.size(),
                                 cfg.limit.value_or(dataset.examples.size()));

  json manifest;
  if (options.run_dir) {
    std::error_code ec;
    fs::create_directories(*options.run_dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create run directory: " + ec.message());
    manifest = {{"command_line", options.command_line},
                {"version", SIFID_VERSION},
                {"fingerprint", fingerprint},
                {"config", config_json(cfg, tmpl, judge_identity)},
                {"template_sha256", sha256_hex(tmpl.body())},
                {"dataset", {{"name", dataset.name},
                             {"split", split_name(dataset.split)},
                             {"sha256", sha256_hex(serialize_dataset(dataset))}}},
                {"started_at", utc_now()}};
    write_file(*options.run_dir / "manifest.json", manifest.dump(2) + "\n");
  }

  EvalRun run;
  run.results.resize(n);
  parallel_for(n, cfg.concurrency, [&](std::size_t k) {
    run.results[k] = detect(dataset.examples[k], cfg, backends);
  });
  std::sort(run.results.begin(), run.results.end(),
            [](const ExampleResult& a, const ExampleResult& b) { return a.id < b.id; });

  EvalReport& report = run.report;
  report.benchmark = dataset.name;
  report.split = std::string(split_name(dataset.split));
  report.fingerprint = fingerprint;
  report.n_examples = n;

  std::vector<int> golds;
  std::vector<int> preds;
  double removal_sum = 0.0;
  std::size_t completed = 0;
  for (const auto& r : run.results) {
    if (r.errored()) {
      ++report.error_count;
      continue;
    }
    ++completed;
    removal_sum += r.removal_rate;
    if (r.verdict.label == VerdictLabel::kUnparseable) ++report.unparseable_count;
    if (r.fallback_used) ++report.fallback_count;
    if (r.prompt_tokens) report.total_prompt_tokens += *r.prompt_tokens;
    if (r.tokens_estimated) ++report.estimated_token_examples;
    if (!r.gold) {
      ++report.unlabeled_count;
      continue;
    }
    golds.push_back(*r.gold);
    preds.push_back(*r.predicted);
  }
  report.n_labeled = golds.size();
  if (completed > 0) report.mean_removal_rate = removal_sum / static_cast<double>(completed);
  if (!golds.empty()) {
    const Confusion c = confusion(golds, preds);
    if (c.tp + c.fn > 0) report.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    if (c.tn + c.fp > 0) report.tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  }
  try {
    report.balanced_accuracy = balanced_accuracy(golds, preds);
  } catch (const Error& e) {
    report.metric_note = e.what();
  }

  if (options.run_dir) {
    std::string lines;
    for (const auto& r : run.results) lines += result_to_json(r) + "\n";
    write_file(*options.run_dir / "results.jsonl", lines);
    write_file(*options.run_dir / "rejects.jsonl", serialize_rejects(options.rejects));
    write_file(*options.run_dir / "report.json", report_to_json(report) + "\n");
    manifest["finished_at"] = utc_now();
    write_file(*options.run_dir / "manifest.json", manifest.dump(2) + "\n");
  }

  const double error_rate = static_cast<double>(report.error_count) / static_cast<double>(n);
  if (error_rate > cfg.max_error_rate) {
    std::string first_error;
    for (const auto& r : run.results) {
      if (r.errored()) {
        first_error = r.error;
        break;
      }
    }
    std::ostringstream msg;
    msg << report.error_count << " of " << n << " examples failed (first: " << first_error << ")";
    spdlog::error("evaluation failed: {}", msg.str());
    throw RunFailed(msg.str(), std::move(run));
  }
  return run;
}

std::string report_to_json(const EvalReport& report) {
  json j = {{"benchmark", report.benchmark},
            {"split", report.split},
            {"fingerprint", report.fingerprint},
            {"n_examples", report.n_examples},
            {"n_labeled", report.n_labeled},
            {"balanced_accuracy", optional_json(report.balanced_accuracy)},
            {"tpr", optional_json(report.tpr)},
            {"tnr", optional_json(report.tnr)},
            {"mean_removal_rate", optional_json(report.mean_removal_rate)},
            {"unparseable_count", report.unparseable_count},
            {"error_count", report.error_count},
            {"unlabeled_count", report.unlabeled_count},
            {"fallback_count", report.fallback_count},
            {"total_prompt_tokens", report.total_prompt_tokens},
            {"estimated_token_examples", report.estimated_token_examples}};
  if (!report.metric_note.empty()) j["metric_note"] = report.metric_note;
  return j.dump();
}

std::string result_to_json(const ExampleResult& r) {
  json j = {{"id", r.id},
            {"gold", r.gold ? json(*r.gold) : json(nullptr)},
            {"predicted", r.predicted ? json(*r.predicted) : json(nullptr)},
            {"label", verdict_label_name(r.verdict.label)},
            {"raw_response", r.verdict.raw},
            {"matched_token", r.verdict.matched_token ? json(*r.verdict.matched_token) : json(nullptr)},
            {"match_position",
             r.verdict.match_position ? json(*r.verdict.match_position) : json(nullptr)},
            {"document_sentences", r.document_sentences},
            {"kept_indices", r.kept_indices},
            {"removal_rate", r.removal_rate},
            {"fallback_used", r.fallback_used},
            {"prompt_tokens", r.prompt_tokens ? json(*r.prompt_tokens) : json(nullptr)},
            {"completion_tokens", r.completion_tokens ? json(*r.completion_tokens) : json(nullptr)},
            {"tokens_estimated", r.tokens_estimated},
            {"judge_cached", r.judge_cached},
            {"retries", r.retries},
            {"wall_time", r.wall_time}};
  if (r.errored()) {
    j["error"] = {{"code", error_code_name(*r.error_code)}, {"message", r.error}};
  }
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string format_report_table(const EvalReport& report) {
  auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << *v;
    return os.str();
  };
  std::ostringstream os;
  os << std::left;
  auto row = [&](const std::string& key, const std::string& value) {
    os << "  " << std::setw(26) << key << value << "\n";
  };
  os << "benchmark " << report.benchmark << " (" << report.split << ")\n";
  row("examples", std::to_string(report.n_examples));
  row("labeled", std::to_string(report.n_labeled));
  row("balanced_accuracy", pct(report.balanced_accuracy));
  row("tpr", pct(report.tpr));
  row("tnr", pct(report.tnr));
  row("mean_removal_rate", pct(report.mean_removal_rate));
  row("unparseable_count", std::to_string(report.unparseable_count));
  row("error_count", std::to_string(report.error_count));
  row("fallback_count", std::to_string(report.fallback_count));
  row("total_prompt_tokens", std::to_string(report.total_prompt_tokens) +
                                 (report.estimated_token_examples > 0 ? " (estimated)" : ""));
  row("fingerprint", report.fingerprint.substr(0, 16));
  if (!report.metric_note.empty()) row("note", report.metric_note);
  return os.str();
}

}  // namespace sifid
