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

#include "scorer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <unordered_set>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "cache.hpp"
#include "error.hpp"
#include "parallel.hpp"

namespace sifid {
namespace {

using json = nlohmann::json;

Error protocol_error(const std::string& what, std::string_view body) {
  Error err(ErrorCode::kProtocol, "scorer protocol error: " + what);
  err.with_body(std::string(body));
  return err;
}

double finite_number(const json& value, const char* field, std::string_view body) {
  if (!value.is_number()) throw protocol_error(std::string(field) + " is not a number", body);
  const double d = value.get<double>();
  if (!std::isfinite(d)) throw protocol_error(std::string(field) + " is not finite", body);
  return d;
}

NliProbs probs_from_json(const json& item, std::string_view body) {
  if (!item.is_object()) throw protocol_error("result is not an object", body);
  for (const char* field : {"entailment", "neutral", "contradiction"}) {
    if (!item.contains(field)) throw protocol_error(std::string("missing ") + field, body);
  }
  NliProbs p{finite_number(item["entailment"], "entailment", body),
             finite_number(item["neutral"], "neutral", body),
             finite_number(item["contradiction"], "contradiction", body)};
  if (!is_valid(p)) throw protocol_error("result is not a probability distribution", body);
  return p;
}

std::vector<double> vector_from_json(const json& item, std::string_view body) {
  if (!item.is_array()) throw protocol_error("vector is not an array", body);
  std::vector<double> v;
  v.reserve(item.size());
  for (const auto& x : item) v.push_back(finite_number(x, "vector component", body));
  return v;
}

json parse_object(std::string_view body) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw protocol_error("malformed JSON", body);
  if (!j.is_object()) throw protocol_error("response is not an object", body);
  return j;
}

std::string reported_model(const json& j, std::string_view body) {
  auto it = j.find("model");
  if (it == j.end() || !it->is_string()) throw protocol_error("missing model", body);
  return it->get<std::string>();
}

std::string nli_cache_payload(const std::string& model, const std::string& premise,
                              const std::string& hypothesis) {
  return json{{"kind", "nli"}, {"model", model}, {"premise", premise},
              {"hypothesis", hypothesis}}
      .dump();
}

std::string embed_cache_payload(const std::string& model, const std::string& input) {
  return json{{"kind", "embed"}, {"model", model}, {"input", input}}.dump();
}

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

template <typename T>
std::vector<std::span<const T>> chunk(const std::vector<T>& items, std::size_t size) {
  std::vector<std::span<const T>> out;
  const std::size_t step = std::max<std::size_t>(size, 1);
  for (std::size_t i = 0; i < items.size(); i += step) {
    out.push_back(std::span<const T>(items).subspan(i, std::min(step, items.size() - i)));
  }
  return out;
}

struct ScoredPair {
  std::string model;
  NliProbs probs;
};

RelevanceMatrix build_entailment(const SentenceDoc& doc, const SentenceDoc& summary,
                                 const ScorerKind& kind, ScorerBackend& backend, Cache* cache,
                                 const ScorerOptions& options) {
  const std::size_t m = doc.size();
  const std::size_t n = summary.size();

  // Unique pairs, keyed by cache payload, in first-seen (row-major) order.
  std::map<std::string, std::optional<ScoredPair>> results;
  std::vector<std::string> pair_payload(m * n);
  std::vector<NliPair> missing;
  std::vector<std::string> missing_payload;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& premise = doc.sentences[i].text;
      const auto& hypothesis = summary.sentences[j].text;
      std::string payload = nli_cache_payload(kind.model_id, premise, hypothesis);
      pair_payload[i * n + j] = payload;
      auto [it, inserted] = results.try_emplace(payload);
      if (!inserted) continue;
      if (cache) {
        if (auto hit = cache->get(CacheKey::make(CacheNamespace::kNli, payload))) {
          json stored = json::parse(*hit, nullptr, false);
          if (stored.is_object() && stored.contains("result") && stored.contains("model") &&
              stored["model"].is_string()) {
            try {
              it->second = ScoredPair{stored["model"].get<std::string>(),
                                      probs_from_json(stored["result"], *hit)};
              continue;
            } catch (const Error&) {
              spdlog::warn("cache: unusable nli entry, rescoring");
            }
          }
        }
      }
      missing.push_back({premise, hypothesis});
      missing_payload.push_back(std::move(payload));
    }
  }

  const auto batches = chunk(missing, options.batch_size);
  std::mutex results_mutex;
  parallel_for(batches.size(), options.max_in_flight, [&](std::size_t b) {
    const auto batch = batches[b];
    const std::size_t offset = static_cast<std::size_t>(batch.data() - missing.data());
    const std::string body = backend.nli(nli_request_body(batch));
    json j = parse_object(body);
    NliResponse parsed = parse_nli_response(body, batch.size());
    const json& items = j["results"];
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const std::string& payload = missing_payload[offset + k];
      if (cache) {
        json stored = {{"model", parsed.model}, {"result", items[k]}};
        cache->put(CacheKey::make(CacheNamespace::kNli, payload), stored.dump(), parsed.model);
      }
      std::lock_guard lock(results_mutex);
      results[payload] = ScoredPair{parsed.model, parsed.results[k]};
    }
  });

  std::vector<double> scores(m * n);
  std::string model;
  for (std::size_t idx = 0; idx < m * n; ++idx) {
    const ScoredPair& scored = *results.at(pair_payload[idx]);
    if (idx == 0) {
      model = scored.model;
    } else if (scored.model != model) {
      spdlog::warn("scorer: mixed models in one matrix ({} vs {})", model, scored.model);
    }
    scores[idx] = net_entailment(scored.probs);
  }
  return RelevanceMatrix(m, n, std::move(scores), ScorerKind{ScorerVariant::kEntailment, model});
}

RelevanceMatrix build_similarity(const SentenceDoc& doc, const SentenceDoc& summary,
                                 const ScorerKind& kind, ScorerBackend& backend, Cache* cache,
                                 const ScorerOptions& options) {
  struct Embedded {
    std::string model;
    std::vector<double> vector;
  };
  std::map<std::string, std::optional<Embedded>> vectors;
  std::vector<std::string> missing;
  auto request = [&](const std::string& text) {
    auto [it, inserted] = vectors.try_emplace(text);
    if (!inserted) return;
    if (cache) {
      const std::string payload = embed_cache_payload(kind.model_id, text);
      if (auto hit = cache->get(CacheKey::make(CacheNamespace::kEmbed, payload))) {
        json stored = json::parse(*hit, nullptr, false);
        if (stored.is_object() && stored.contains("vector") && stored.contains("model") &&
            stored["model"].is_string()) {
          try {
            it->second = Embedded{stored["model"].get<std::string>(),
                                  vector_from_json(stored["vector"], *hit)};
            return;
          } catch (const Error&) {
            spdlog::warn("cache: unusable embed entry, re-embedding");
          }
        }
      }
    }
    missing.push_back(text);
  };
  for (const auto& s : doc.sentences) request(s.text);
  for (const auto& s : summary.sentences) request(s.text);

  const auto batches = chunk(missing, options.batch_size);
  std::mutex vectors_mutex;
  parallel_for(batches.size(), options.max_in_flight, [&](std::size_t b) {
    const auto batch = batches[b];
    const std::string body = backend.embed(embed_request_body(batch));
    EmbedResponse parsed = parse_embed_response(body, batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
      if (cache) {
        json stored = {{"model", parsed.model}, {"vector", parsed.vectors[k]}};
        cache->put(CacheKey::make(CacheNamespace::kEmbed, embed_cache_payload(kind.model_id, batch[k])),
                   stored.dump(), parsed.model);
      }
      std::lock_guard lock(vectors_mutex);
      vectors[batch[k]] = Embedded{parsed.model, std::move(parsed.vectors[k])};
    }
  });

  const std::size_t m = doc.size();
  const std::size_t n = summary.size();
  const std::string model = vectors.at(doc.sentences[0].text)->model;
  std::vector<double> scores(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& u = vectors.at(doc.sentences[i].text)->vector;
    if (l2_norm(u) == 0.0) {
      Error err(ErrorCode::kScoring,
                "zero embedding for document sentence " + std::to_string(i));
      throw err.with_sentence_index(i);
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto& v = vectors.at(summary.sentences[j].text)->vector;
      if (l2_norm(v) == 0.0) {
        Error err(ErrorCode::kScoring,
                  "zero embedding for summary sentence " + std::to_string(j));
        throw err.with_sentence_index(j);
      }
      if (u.size() != v.size()) {
        Error err(ErrorCode::kScoring, "embedding dimension mismatch between document sentence " +
                                           std::to_string(i) + " and summary sentence " +
                                           std::to_string(j));
        throw err.with_sentence_index(i);
      }
      scores[i * n + j] = cosine_similarity(u, v);
    }
  }
  return RelevanceMatrix(m, n, std::move(scores), ScorerKind{ScorerVariant::kSimilarity, model});
}

std::vector<std::string> long_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 5) words.push_back(current);
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return words;
}

}  // namespace

std::string_view scorer_variant_name(ScorerVariant v) {
  switch (v) {
    case ScorerVariant::kEntailment: return "entailment";
    case ScorerVariant::kSimilarity: return "similarity";
    case ScorerVariant::kMock: return "mock";
  }
  return "unknown";
}

ScorerVariant parse_scorer_variant(std::string_view name) {
  if (name == "entailment") return ScorerVariant::kEntailment;
  if (name == "similarity") return ScorerVariant::kSimilarity;
  if (name == "mock") return ScorerVariant::kMock;
  throw Error(ErrorCode::kConfig, "unknown scorer '" + std::string(name) + "'");
}

bool is_valid(const NliProbs& p) {
  for (double x : {p.entailment, p.neutral, p.contradiction}) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) return false;
  }
  return std::abs(p.entailment + p.neutral + p.contradiction - 1.0) <= kProbSumTolerance;
}

double net_entailment(const NliProbs& p) { return p.entailment - p.contradiction; }

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.empty() || v.empty()) throw Error(ErrorCode::kScoring, "cosine: empty vector");
  if (u.size() != v.size()) throw Error(ErrorCode::kScoring, "cosine: dimension mismatch");
  double dot = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) dot += u[k] * v[k];
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::kScoring, "cosine: zero vector");
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

double mock_score(std::string_view doc_sentence, std::string_view summary_sentence) {
  const auto doc_words = long_words(doc_sentence);
  const std::unordered_set<std::string> doc_set(doc_words.begin(), doc_words.end());
  for (const auto& w : long_words(summary_sentence)) {
    if (doc_set.contains(w)) return 1.0;
  }
  return -1.0;
}

RelevanceMatrix::RelevanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> scores,
                                 ScorerKind kind)
    : rows_(rows), cols_(cols), scores_(std::move(scores)), kind_(std::move(kind)) {
  if (scores_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kInvalidInput, "relevance matrix: shape does not match score count");
  }
  for (double s : scores_) {
    if (!std::isfinite(s) || s < -1.0 || s > 1.0) {
      throw Error(ErrorCode::kInvalidInput, "relevance matrix: score outside [-1, 1]");
    }
  }
}

HttpScorerBackend::HttpScorerBackend(EndpointConfig config)
    : endpoint_(std::move(config), ErrorCode::kProtocol) {}

std::string HttpScorerBackend::nli(const std::string& request_body) {
  return endpoint_.post("/v1/nli", request_body).body;
}

std::string HttpScorerBackend::embed(const std::string& request_body) {
  return endpoint_.post("/v1/embed", request_body).body;
}

std::string nli_request_body(std::span<const NliPair> pairs) {
  json list = json::array();
  for (const auto& p : pairs) list.push_back({{"premise", p.premise}, {"hypothesis", p.hypothesis}});
  return json{{"pairs", std::move(list)}}.dump();
}

std::string embed_request_body(std::span<const std::string> inputs) {
  return json{{"inputs", json(std::vector<std::string>(inputs.begin(), inputs.end()))}}.dump();
}

NliResponse parse_nli_response(std::string_view body, std::size_t expected) {
  json j = parse_object(body);
  NliResponse out;
  out.model = reported_model(j, body);
  auto it = j.find("results");
  if (it == j.end() || !it->is_array()) throw protocol_error("missing results array", body);
  if (it->size() != expected) {
    throw protocol_error("expected " + std::to_string(expected) + " results, got " +
                             std::to_string(it->size()),
                         body);
  }
  out.results.reserve(expected);
  for (const auto& item : *it) out.results.push_back(probs_from_json(item, body));
  return out;
}

EmbedResponse parse_embed_response(std::string_view body, std::size_t expected) {
  json j = parse_object(body);
  EmbedResponse out;
  out.model = reported_model(j, body);
  auto dim = j.find("dim");
  if (dim == j.end() || !dim->is_number_unsigned() || dim->get<std::size_t>() == 0) {
    throw protocol_error("missing or invalid dim", body);
  }
  out.dim = dim->get<std::size_t>();
  auto it = j.find("vectors");
  if (it == j.end() || !it->is_array()) throw protocol_error("missing vectors array", body);
  if (it->size() != expected) {
    throw protocol_error("expected " + std::to_string(expected) + " vectors, got " +
                             std::to_string(it->size()),
                         body);
  }
  for (const auto& item : *it) {
    auto v = vector_from_json(item, body);
    if (v.size() != out.dim) throw protocol_error("vector length differs from dim", body);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

RelevanceMatrix build_relevance_matrix(const SentenceDoc& doc, const SentenceDoc& summary,
                                       const ScorerKind& kind, ScorerBackend* backend,
                                       Cache* cache, const ScorerOptions& options) {
  if (doc.empty()) throw Error(ErrorCode::kInvalidInput, "document has no sentences");
  if (summary.empty()) throw Error(ErrorCode::kInvalidInput, "summary has no sentences");

  if (kind.variant == ScorerVariant::kMock) {
    std::vector<double> scores;
    scores.reserve(doc.size() * summary.size());
    for (const auto& d : doc.sentences) {
      for (const auto& s : summary.sentences) scores.push_back(mock_score(d.text, s.text));
    }
    return RelevanceMatrix(doc.size(), summary.size(), std::move(scores),
                           ScorerKind{ScorerVariant::kMock, "mock"});
  }
  if (!backend) throw Error(ErrorCode::kConfig, "no scorer endpoint configured");
  if (kind.variant == ScorerVariant::kEntailment) {
    return build_entailment(doc, summary, kind, *backend, cache, options);
  }
  return build_similarity(doc, summary, kind, *backend, cache, options);
}

}  // namespace sifid
