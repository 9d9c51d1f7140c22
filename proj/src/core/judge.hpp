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

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "http.hpp"
#include "prompting.hpp"

namespace sifid {

class Cache;

enum class VerdictLabel { kConsistent, kInconsistent, kUnparseable };

std::string_view verdict_label_name(VerdictLabel label);

struct Verdict {
  std::string raw;
  VerdictLabel label = VerdictLabel::kUnparseable;
  std::optional<std::string> matched_token;  // as written in the response
  std::optional<std::size_t> match_position;  // byte offset into raw
};

// Finds case-insensitive whole-word "yes" and "no"; the occurrence with the
// greatest offset decides. A word boundary is any byte that is not an ASCII
// letter, digit or underscore, so "know" and "yesterday" never match.
Verdict parse_verdict(std::string_view raw);

enum class UnparseablePolicy { kInconsistent, kConsistent };

UnparseablePolicy parse_unparseable_policy(std::string_view name);

// 1 for Consistent, 0 for Inconsistent, Unparseable mapped by policy.
int predicted_label(const Verdict& verdict, UnparseablePolicy policy);

struct JudgeConfig {
  std::string endpoint_url;
  std::string api_token;
  std::string model = "gpt-4-1106-preview";
  double temperature = 0.0;
  int max_output_tokens = 512;
  int retry_budget = 3;
  std::chrono::seconds timeout{60};
  std::chrono::milliseconds base_backoff{500};
  UnparseablePolicy unparseable = UnparseablePolicy::kInconsistent;
};

// Throws Error(kConfig) on a negative temperature, retry budget or token cap.
void validate(const JudgeConfig& cfg);

// Chat-completion request body for one user message.
std::string chat_request_body(const JudgeConfig& cfg, std::string_view prompt);

struct ChatCompletion {
  std::string content;
  std::optional<long long> prompt_tokens;
  std::optional<long long> completion_tokens;
};

// Reads choices[0].message.content and usage. Throws Error(kProtocol) for a
// malformed body or an empty completion.
ChatCompletion parse_chat_response(std::string_view body);

struct BackendReply {
  std::string body;
  int retries = 0;
};

class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  virtual BackendReply complete(const std::string& request_body) = 0;
  // Distinguishes backends that would answer the same request differently;
  // part of every judge cache key.
  virtual std::string identity() const = 0;
  std::size_t calls() const { return calls_.load(); }

 protected:
  std::atomic<std::size_t> calls_{0};
};

// POST {endpoint}/chat/completions with a bearer token when configured.
class HttpJudgeBackend : public JudgeBackend {
 public:
  explicit HttpJudgeBackend(const JudgeConfig& cfg);
  BackendReply complete(const std::string& request_body) override;
  std::string identity() const override { return "http"; }
  const JsonEndpoint& endpoint() const { return endpoint_; }

 private:
  JsonEndpoint endpoint_;
};

// Canned responses: the first rule whose substring occurs in the prompt
// answers, otherwise the default response. Replies carry no usage block.
class MockJudgeBackend : public JudgeBackend {
 public:
  struct Rule {
    std::string contains;
    std::string response;
  };

  explicit MockJudgeBackend(std::string default_response, std::vector<Rule> rules = {});

  // JSON: {"default": "...", "rules": [{"contains": "...", "response": "..."}]}
  static std::unique_ptr<MockJudgeBackend> from_json(std::string_view text);
  static std::unique_ptr<MockJudgeBackend> from_file(const std::string& path);

  BackendReply complete(const std::string& request_body) override;
  std::string identity() const override;

 private:
  std::string default_response_;
  std::vector<Rule> rules_;
};

struct JudgeReply {
  std::string text;
  std::optional<long long> prompt_tokens;
  std::optional<long long> completion_tokens;
  bool from_cache = false;
  int retries = 0;
};

// Returns the first message's text. Identical requests (same prompt, model,
// temperature and token cap against the same backend) come from `cache`
// when present; fresh raw responses are written back.
JudgeReply query_judge(const RenderedPrompt& prompt, const JudgeConfig& cfg,
                       JudgeBackend& backend, Cache* cache);

}  // namespace sifid
