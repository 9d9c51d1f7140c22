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

#include "judge.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "cache.hpp"
#include "error.hpp"
#include "hashing.hpp"

namespace sifid {
namespace {

using json = nlohmann::json;

bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || (u >= '0' && u <= '9') || u == '_';
}

bool iequals(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t k = 0; k < word.size(); ++k) {
    char c = text[pos + k];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != word[k]) return false;
  }
  return true;
}

Error protocol_error(const std::string& what, std::string_view body) {
  Error err(ErrorCode::kProtocol, "judge protocol error: " + what);
  err.with_body(std::string(body));
  return err;
}

}  // namespace

std::string_view verdict_label_name(VerdictLabel label) {
  switch (label) {
    case VerdictLabel::kConsistent: return "Consistent";
    case VerdictLabel::kInconsistent: return "Inconsistent";
    case VerdictLabel::kUnparseable: return "Unparseable";
  }
  return "Unparseable";
}

Verdict parse_verdict(std::string_view raw) {
  Verdict v;
  v.raw = std::string(raw);
  for (std::size_t pos = 0; pos < raw.size(); ++pos) {
    if (pos > 0 && is_word_byte(raw[pos - 1])) continue;
    for (std::string_view word : {std::string_view("yes"), std::string_view("no")}) {
      if (!iequals(raw, pos, word)) continue;
      const std::size_t end = pos + word.size();
      if (end < raw.size() && is_word_byte(raw[end])) continue;
      v.label = word == "yes" ? VerdictLabel::kConsistent : VerdictLabel::kInconsistent;
      v.matched_token = std::string(raw.substr(pos, word.size()));
      v.match_position = pos;
    }
  }
  return v;
}

UnparseablePolicy parse_unparseable_policy(std::string_view name) {
  if (name == "inconsistent") return UnparseablePolicy::kInconsistent;
  if (name == "consistent") return UnparseablePolicy::kConsistent;
  throw Error(ErrorCode::kConfig, "unknown unparseable policy '" + std::string(name) + "'");
}

int predicted_label(const Verdict& verdict, UnparseablePolicy policy) {
  switch (verdict.label) {
    case VerdictLabel::kConsistent: return 1;
    case VerdictLabel::kInconsistent: return 0;
    case VerdictLabel::kUnparseable: break;
  }
  return policy == UnparseablePolicy::kConsistent ? 1 : 0;
}

void validate(const JudgeConfig& cfg) {
  if (!(cfg.temperature >= 0.0)) throw Error(ErrorCode::kConfig, "temperature must be >= 0");
  if (cfg.retry_budget < 0) throw Error(ErrorCode::kConfig, "retry budget must be >= 0");
  if (cfg.max_output_tokens <= 0) throw Error(ErrorCode::kConfig, "max tokens must be > 0");
  if (cfg.model.empty()) throw Error(ErrorCode::kConfig, "judge model must be set");
}

std::string chat_request_body(const JudgeConfig& cfg, std::string_view prompt) {
  json body = {{"model", cfg.model},
               {"temperature", cfg.temperature},
               {"max_tokens", cfg.max_output_tokens},
               {"messages", json::array({{{"role", "user"}, {"content", std::string(prompt)}}})}};
  return body.dump();
}

ChatCompletion parse_chat_response(std::string_view body) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) throw protocol_error("malformed JSON", body);
  auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array()) throw protocol_error("missing choices", body);
  if (choices->empty()) throw protocol_error("empty completion", body);
  const json& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object()) {
    throw protocol_error("missing message", body);
  }
  const json& message = first["message"];
  auto content = message.find("content");
  if (content == message.end() || content->is_null()) throw protocol_error("empty completion", body);
  if (!content->is_string()) throw protocol_error("content is not a string", body);
  ChatCompletion out;
  out.content = content->get<std::string>();
  if (out.content.empty()) throw protocol_error("empty completion", body);
  if (auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
    if (auto p = usage->find("prompt_tokens"); p != usage->end() && p->is_number_integer()) {
      out.prompt_tokens = p->get<long long>();
    }
    if (auto c = usage->find("completion_tokens"); c != usage->end() && c->is_number_integer()) {
      out.completion_tokens = c->get<long long>();
    }
  }
  return out;
}

namespace {

EndpointConfig judge_endpoint(const JudgeConfig& cfg) {
  if (cfg.endpoint_url.empty()) {
    throw Error(ErrorCode::kConfig, "no judge endpoint configured");
  }
  EndpointConfig e;
  e.base_url = cfg.endpoint_url;
  e.bearer_token = cfg.api_token;
  e.timeout = cfg.timeout;
  e.retry.retry_budget = cfg.retry_budget;
  e.retry.base_backoff = cfg.base_backoff;
  return e;
}

}  // namespace

HttpJudgeBackend::HttpJudgeBackend(const JudgeConfig& cfg)
    : endpoint_(judge_endpoint(cfg), ErrorCode::kJudge) {}

BackendReply HttpJudgeBackend::complete(const std::string& request_body) {
  calls_.fetch_add(1);
  HttpReply reply = endpoint_.post("/chat/completions", request_body);
  return BackendReply{std::move(reply.body), reply.retries};
}

MockJudgeBackend::MockJudgeBackend(std::string default_response, std::vector<Rule> rules)
    : default_response_(std::move(default_response)), rules_(std::move(rules)) {}

std::unique_ptr<MockJudgeBackend> MockJudgeBackend::from_json(std::string_view text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kConfig, "mock judge rules: malformed JSON");
  }
  std::string fallback;
  if (auto d = j.find("default"); d != j.end()) {
    if (!d->is_string()) throw Error(ErrorCode::kConfig, "mock judge rules: default must be a string");
    fallback = d->get<std::string>();
  }
  std::vector<Rule> rules;
  if (auto r = j.find("rules"); r != j.end()) {
    if (!r->is_array()) throw Error(ErrorCode::kConfig, "mock judge rules: rules must be a list");
    for (const auto& item : *r) {
      if (!item.is_object() || !item.contains("contains") || !item.contains("response") ||
          !item["contains"].is_string() || !item["response"].is_string()) {
        throw Error(ErrorCode::kConfig,
                    "mock judge rules: each rule needs string 'contains' and 'response'");
      }
      rules.push_back({item["contains"].get<std::string>(), item["response"].get<std::string>()});
    }
  }
  return std::make_unique<MockJudgeBackend>(std::move(fallback), std::move(rules));
}

std::unique_ptr<MockJudgeBackend> MockJudgeBackend::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read mock judge rules '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

BackendReply MockJudgeBackend::complete(const std::string& request_body) {
  calls_.fetch_add(1);
  json request = json::parse(request_body);
  const std::string prompt = request.at("messages").at(0).at("content").get<std::string>();
  const std::string* response = &default_response_;
  for (const auto& rule : rules_) {
    if (prompt.find(rule.contains) != std::string::npos) {
      response = &rule.response;
      break;
    }
  }
  json body = {{"model", request.value("model", std::string("mock"))},
               {"choices", json::array({{{"index", 0},
                                         {"message", {{"role", "assistant"}, {"content", *response}}},
                                         {"finish_reason", "stop"}}})}};
  return BackendReply{body.dump(), 0};
}

std::string MockJudgeBackend::identity() const {
  json j = {{"default", default_response_}, {"rules", json::array()}};
  for (const auto& r : rules_) j["rules"].push_back({{"contains", r.contains}, {"response", r.response}});
  return "mock:" + sha256_hex(j.dump()).substr(0, 16);
}

JudgeReply query_judge(const RenderedPrompt& prompt, const JudgeConfig& cfg,
                       JudgeBackend& backend, Cache* cache) {
  const std::string request = chat_request_body(cfg, prompt.text);
  const std::string key_payload =
      json{{"backend", backend.identity()}, {"request", json::parse(request)}}.dump();
  const CacheKey key = CacheKey::make(CacheNamespace::kJudge, key_payload);

  if (cache) {
    if (auto hit = cache->get(key)) {
      try {
        ChatCompletion c = parse_chat_response(*hit);
        return JudgeReply{std::move(c.content), c.prompt_tokens, c.completion_tokens, true, 0};
      } catch (const Error& e) {
        spdlog::warn("cache: unusable judge entry ({}), querying again", e.what());
      }
    }
  }

  BackendReply reply = backend.complete(request);
  ChatCompletion c = parse_chat_response(reply.body);
  if (cache) cache->put(key, reply.body, cfg.model);
  return JudgeReply{std::move(c.content), c.prompt_tokens, c.completion_tokens, false,
                    reply.retries};
}

}  // namespace sifid
