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

// Command-line front end. Everything goes through the C API in sifid/sifid.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sifid/sifid.h"

namespace {

using json = nlohmann::json;

// Process exit codes.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitTransport = 2;
constexpr int kExitUnparseable = 3;
constexpr int kExitDataset = 4;

int exit_code_for(sifid_status status) {
  switch (status) {
    case SIFID_OK: return kExitOk;
    case SIFID_ERR_TRANSPORT:
    case SIFID_ERR_PROTOCOL:
    case SIFID_ERR_JUDGE:
    case SIFID_ERR_RUN_FAILED: return kExitTransport;
    case SIFID_ERR_DATASET: return kExitDataset;
    default: return kExitConfig;
  }
}

struct Options {
  std::string scorer = "entailment";
  std::optional<double> beta;
  std::size_t window = 1;
  std::string empty_fallback = "full";
  std::string template_name = "generic";
  bool cot = false;
  std::string template_file;
  std::string abbreviations_file;
  std::string scorer_url;
  std::string scorer_token;
  std::string scorer_model = "default";
  std::size_t batch_size = 64;
  std::string judge_url;
  std::string judge_token;
  std::string judge_model = "gpt-4-1106-preview";
  double temperature = 0.0;
  int max_tokens = 512;
  int retries = 3;
  int timeout = 60;
  std::optional<std::string> judge_mock_response;
  std::string judge_mock_rules;
  std::string unparseable = "inconsistent";
  std::string cache_dir;
  std::size_t concurrency = 4;

  // eval
  std::string dataset;
  std::string benchmark;
  std::string split;
  std::string run_dir;
  std::optional<std::size_t> limit;
  double max_error_rate = 0.5;

  // filter / judge / matrix
  std::string document_path;
  std::string summary_path;
};

void add_pipeline_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--scorer", o.scorer, "Relevance scorer: entailment|similarity|mock|none")
      ->check(CLI::IsMember({"entailment", "similarity", "mock", "none"}))
      ->capture_default_str();
  cmd->add_option("--beta", o.beta,
                  "Filter threshold (default: 0.0 for entailment and mock, 0.5 for similarity)");
  cmd->add_option("--window", o.window, "Neighbors kept on each side of a selected sentence")
      ->capture_default_str();
  cmd->add_option("--empty-fallback", o.empty_fallback,
                  "When nothing passes the threshold: full (send the whole document) | error")
      ->check(CLI::IsMember({"full", "error"}))
      ->capture_default_str();
  cmd->add_option("--template", o.template_name, "Judge prompt template: generic|polytope")
      ->check(CLI::IsMember({"generic", "polytope"}))
      ->capture_default_str();
  cmd->add_flag("--cot", o.cot, "Use the chain-of-thought answer suffix");
  cmd->add_option("--template-file", o.template_file,
                  "Template file with {{ Article }} and {{ Summary }} slots")
      ->check(CLI::ExistingFile);
  cmd->add_option("--abbreviations", o.abbreviations_file,
                  "Abbreviation list for the sentence splitter, one token per line")
      ->check(CLI::ExistingFile);
  cmd->add_option("--scorer-url", o.scorer_url, "Scorer endpoint base URL")
      ->envname("SIFID_SCORER_URL");
  cmd->add_option("--scorer-token", o.scorer_token, "Scorer bearer token")
      ->envname("SIFID_SCORER_TOKEN");
  cmd->add_option("--scorer-model", o.scorer_model, "Scorer model label (cache partition)")
      ->capture_default_str();
  cmd->add_option("--batch-size", o.batch_size, "Sentence pairs per scorer request")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--judge-url", o.judge_url, "Chat-completions endpoint base URL")
      ->envname("SIFID_JUDGE_URL");
  cmd->add_option("--judge-token", o.judge_token, "Judge API key")->envname("SIFID_JUDGE_TOKEN");
  cmd->add_option("--judge-model", o.judge_model, "Judge model name")->capture_default_str();
  cmd->add_option("--temperature", o.temperature, "Judge sampling temperature")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--max-tokens", o.max_tokens, "Judge completion token cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--retries", o.retries, "Retry budget for transient HTTP failures")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--timeout", o.timeout, "HTTP timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--judge-mock-response", o.judge_mock_response,
                  "Offline mock judge answering every prompt with this text");
  cmd->add_option("--judge-mock-rules", o.judge_mock_rules,
                  "Offline mock judge rules (JSON: default + contains/response rules)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--unparseable", o.unparseable,
                  "Prediction for responses without Yes/No: inconsistent|consistent")
      ->check(CLI::IsMember({"inconsistent", "consistent"}))
      ->capture_default_str();
  cmd->add_option("--cache-dir", o.cache_dir, "Response cache directory (no caching when unset)")
      ->envname("SIFID_CACHE_DIR");
  cmd->add_option("--concurrency", o.concurrency, "Examples in flight during eval")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

json pipeline_config(const Options& o) {
  json j = {{"scorer", o.scorer},
            {"window", o.window},
            {"empty_fallback", o.empty_fallback},
            {"template", o.template_name},
            {"cot", o.cot},
            {"scorer_model", o.scorer_model},
            {"batch_size", o.batch_size},
            {"judge_model", o.judge_model},
            {"temperature", o.temperature},
            {"max_tokens", o.max_tokens},
            {"retries", o.retries},
            {"timeout", o.timeout},
            {"unparseable", o.unparseable},
            {"concurrency", o.concurrency},
            {"max_error_rate", o.max_error_rate}};
  if (o.beta) j["beta"] = *o.beta;
  if (!o.template_file.empty()) j["template_file"] = o.template_file;
  if (!o.abbreviations_file.empty()) j["abbreviations_file"] = o.abbreviations_file;
  if (!o.scorer_url.empty()) j["scorer_url"] = o.scorer_url;
  if (!o.scorer_token.empty()) j["scorer_token"] = o.scorer_token;
  if (!o.judge_url.empty()) j["judge_url"] = o.judge_url;
  if (!o.judge_token.empty()) j["judge_token"] = o.judge_token;
  if (o.judge_mock_response) j["judge_mock_response"] = *o.judge_mock_response;
  if (!o.judge_mock_rules.empty()) j["judge_mock_rules"] = o.judge_mock_rules;
  if (!o.cache_dir.empty()) j["cache_dir"] = o.cache_dir;
  if (o.limit) j["limit"] = *o.limit;
  return j;
}

int report_error(sifid_status status) {
  std::cerr << "error: " << sifid_last_error() << "\n";
  return exit_code_for(status);
}

// Owns a string returned by the C API.
struct ApiString {
  char* ptr = nullptr;
  ~ApiString() { sifid_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

struct Pipeline {
  sifid_pipeline* ptr = nullptr;
  ~Pipeline() { sifid_pipeline_destroy(ptr); }
};

bool read_text(const std::string& path, const char* role, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << role << " file '" << path << "'\n";
    return false;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  if (out.find_first_not_of(" \t\r\n\f\v") == std::string::npos) {
    std::cerr << "error: " << role << " file '" << path << "' is empty\n";
    return false;
  }
  return true;
}

std::string index_list(const json& indices) {
  std::string out = "[";
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(indices[k].get<std::size_t>());
  }
  return out + "]";
}

void print_stats(const Pipeline& p) {
  ApiString stats;
  if (sifid_stats(p.ptr, &stats.ptr) != SIFID_OK) return;
  const json s = json::parse(stats.str());
  std::cerr << "backend calls: judge=" << s["judge_calls"] << " scorer=" << s["scorer_requests"]
            << " retries=" << (s["judge_retries"].get<std::size_t>() +
                               s["scorer_retries"].get<std::size_t>());
  if (!s["cache"].is_null()) {
    std::cerr << " cache_hits=" << s["cache"]["hits"] << " cache_writes=" << s["cache"]["writes"];
  }
  std::cerr << "\n";
}

int open_pipeline(const Options& o, Pipeline& p) {
  const sifid_status st = sifid_pipeline_create(pipeline_config(o).dump().c_str(), &p.ptr);
  return st == SIFID_OK ? kExitOk : report_error(st);
}

int cmd_filter(const Options& o) {
  std::string document, summary;
  if (!read_text(o.document_path, "document", document) ||
      !read_text(o.summary_path, "summary", summary)) {
    return kExitConfig;
  }
  Pipeline p;
  if (int rc = open_pipeline(o, p)) return rc;
  ApiString out;
  if (auto st = sifid_filter(p.ptr, document.c_str(), summary.c_str(), &out.ptr); st != SIFID_OK) {
    return report_error(st);
  }
  const json r = json::parse(out.str());
  if (r["fallback_used"].get<bool>()) {
    std::cout << "notice: no sentence scored above beta=" << r["beta"].dump()
              << "; using the full document\n";
  }
  std::cout << "kept=" << index_list(r["kept_indices"]) << "\n";
  std::cout << "removal_rate=" << r["removal_rate"].dump() << "\n";
  std::cout << "fallback_used=" << (r["fallback_used"].get<bool>() ? "true" : "false") << "\n";
  std::cout << "text=" << r["text"].get<std::string>() << "\n";
  print_stats(p);
  return kExitOk;
}

int cmd_judge(const Options& o) {
  std::string document, summary;
  if (!read_text(o.document_path, "document", document) ||
      !read_text(o.summary_path, "summary", summary)) {
    return kExitConfig;
  }
  Pipeline p;
  if (int rc = open_pipeline(o, p)) return rc;
  ApiString out;
  if (auto st = sifid_detect(p.ptr, document.c_str(), summary.c_str(), &out.ptr); st != SIFID_OK) {
    return report_error(st);
  }
  const json r = json::parse(out.str());
  const std::string label = r["verdict"]["label"].get<std::string>();
  std::cout << "label=" << label << "\n";
  std::cout << "matched_token="
            << (r["verdict"]["matched_token"].is_null()
                    ? std::string("none")
                    : r["verdict"]["matched_token"].get<std::string>())
            << "\n";
  std::cout << "removal_rate=" << r["removal_rate"].dump() << "\n";
  std::cout << "kept=" << index_list(r["kept_indices"]) << "\n";
  print_stats(p);
  return label == "Unparseable" ? kExitUnparseable : kExitOk;
}

int cmd_matrix(const Options& o) {
  std::string document, summary;
  if (!read_text(o.document_path, "document", document) ||
      !read_text(o.summary_path, "summary", summary)) {
    return kExitConfig;
  }
  if (o.scorer == "none") {
    std::cerr << "error: matrix needs a scorer (--scorer entailment|similarity|mock)\n";
    return kExitConfig;
  }
  Pipeline p;
  if (int rc = open_pipeline(o, p)) return rc;
  ApiString out;
  if (auto st = sifid_matrix(p.ptr, document.c_str(), summary.c_str(), &out.ptr); st != SIFID_OK) {
    return report_error(st);
  }
  const json r = json::parse(out.str());
  std::cout << "M=" << r["rows"] << " N=" << r["cols"] << " scorer=" << r["scorer"].get<std::string>()
            << " model=" << r["model"].get<std::string>() << "\n";
  std::cout << "matrix=" << r["matrix"].dump() << "\n";
  std::cout << "pooled=" << r["pooled"].dump() << "\n";
  std::cout << "kept=" << index_list(r["kept_indices"]) << "\n";
  std::cout << r.dump() << "\n";
  print_stats(p);
  return kExitOk;
}

int cmd_eval(const Options& o, const std::string& command_line) {
  Pipeline p;
  if (int rc = open_pipeline(o, p)) return rc;
  std::string run_dir = o.run_dir.empty() ? "runs/" + o.benchmark + "-" + o.split : o.run_dir;
  ApiString out;
  const sifid_status st = sifid_evaluate(p.ptr, o.dataset.c_str(), o.benchmark.c_str(),
                                         o.split.c_str(), run_dir.c_str(), command_line.c_str(),
                                         &out.ptr);
  if (out.ptr) {
    const json r = json::parse(out.str());
    std::cout << r["table"].get<std::string>();
    if (r["rejects"].get<std::size_t>() > 0) {
      std::cout << "  rejected lines            " << r["rejects"] << " (see " << run_dir
                << "/rejects.jsonl)\n";
    }
    std::cout << r["report"].dump() << "\n";
  }
  print_stats(p);
  if (st != SIFID_OK) return report_error(st);
  return kExitOk;
}

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += argv[i];
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Summary inconsistency detection with filtered documents"};
  app.set_version_flag("--version", std::string(sifid_version()));
  app.require_subcommand(1);
  Options o;

  auto* filter = app.add_subcommand("filter", "Filter a document against its summary");
  filter->add_option("document", o.document_path, "Document text file")->required();
  filter->add_option("summary", o.summary_path, "Summary text file")->required();
  add_pipeline_flags(filter, o);

  auto* judge = app.add_subcommand("judge", "Judge one document/summary pair");
  judge->add_option("document", o.document_path, "Document text file")->required();
  judge->add_option("summary", o.summary_path, "Summary text file")->required();
  add_pipeline_flags(judge, o);

  auto* matrix = app.add_subcommand("matrix", "Dump the sentence relevance matrix");
  matrix->add_option("document", o.document_path, "Document text file")->required();
  matrix->add_option("summary", o.summary_path, "Summary text file")->required();
  add_pipeline_flags(matrix, o);

  auto* eval = app.add_subcommand("eval", "Evaluate a benchmark file and report balanced accuracy");
  eval->add_option("--dataset", o.dataset, "Line-delimited benchmark file")->required();
  eval->add_option("--benchmark", o.benchmark,
                   "cogensumm|xsumfaith|polytope|factcc|summeval|frank|custom")
      ->required();
  eval->add_option("--split", o.split, "validation|test")
      ->required()
      ->check(CLI::IsMember({"validation", "val", "test"}));
  eval->add_option("--run-dir", o.run_dir, "Output directory (default: runs/<benchmark>-<split>)");
  eval->add_option("--limit", o.limit, "Evaluate only the first N examples")
      ->check(CLI::PositiveNumber);
  eval->add_option("--max-error-rate", o.max_error_rate,
                   "Fail the run when more examples than this fraction error")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_pipeline_flags(eval, o);

  auto* cache = app.add_subcommand("cache", "Manage the response cache");
  cache->require_subcommand(1);
  std::string clear_dir;
  auto* clear = cache->add_subcommand("clear", "Delete every cached response");
  clear->add_option("--cache-dir", clear_dir, "Cache directory")
      ->envname("SIFID_CACHE_DIR")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (*filter) return cmd_filter(o);
  if (*judge) return cmd_judge(o);
  if (*matrix) return cmd_matrix(o);
  if (*eval) return cmd_eval(o, join_args(argc, argv));
  if (*clear) {
    std::size_t removed = 0;
    if (auto st = sifid_cache_clear(clear_dir.c_str(), &removed); st != SIFID_OK) {
      return report_error(st);
    }
    std::cout << "removed " << removed << " cache entries from " << clear_dir << "\n";
    return kExitOk;
  }
  return kExitConfig;
}
