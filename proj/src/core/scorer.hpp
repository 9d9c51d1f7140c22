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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "http.hpp"
#include "segmentation.hpp"

namespace sifid {

class Cache;

enum class ScorerVariant { kEntailment, kSimilarity, kMock };

std::string_view scorer_variant_name(ScorerVariant v);
ScorerVariant parse_scorer_variant(std::string_view name);

struct ScorerKind {
  ScorerVariant variant = ScorerVariant::kMock;
  // Model label. In a request configuration it partitions the cache; on a
  // built matrix it is the model the endpoint reported ("mock" for Mock).
  std::string model_id = "mock";

  bool operator==(const ScorerKind&) const = default;
};

struct NliProbs {
  double entailment = 0.0;
  double neutral = 0.0;
  double contradiction = 0.0;
};

inline constexpr double kProbSumTolerance = 1e-4;

// Each component in [0,1] and the three summing to 1 within kProbSumTolerance.
bool is_valid(const NliProbs& p);

// Entailment minus contradiction.
double net_entailment(const NliProbs& p);

// dot(u,v) / (|u| |v|), clamped to [-1, 1]. Throws Error(kScoring) for a zero
// vector, an empty vector or mismatched dimensions.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// Score of the in-core mock: 1.0 when the two sentences share a word of at
// least five characters (ASCII case-insensitive), otherwise -1.0.
double mock_score(std::string_view doc_sentence, std::string_view summary_sentence);

// Dense row-major M x N matrix of document-by-summary sentence scores.
class RelevanceMatrix {
 public:
  // Throws Error(kInvalidInput) if the shape does not match or any score is
  // non-finite or outside [-1, 1].
  RelevanceMatrix(std::size_t rows, std::size_t cols, std::vector<double> scores,
                  ScorerKind kind);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t i, std::size_t j) const { return scores_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(scores_).subspan(i * cols_, cols_);
  }
  const std::vector<double>& scores() const { return scores_; }
  const ScorerKind& kind() const { return kind_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> scores_;
  ScorerKind kind_;
};

// Wire-level scorer endpoint. Both calls take a request body in the scorer
// wire format and return the raw response body.
class ScorerBackend {
 public:
  virtual ~ScorerBackend() = default;
  virtual std::string nli(const std::string& request_body) = 0;
  virtual std::string embed(const std::string& request_body) = 0;
};

// POST {base}/v1/nli and POST {base}/v1/embed.
class HttpScorerBackend : public ScorerBackend {
 public:
  explicit HttpScorerBackend(EndpointConfig config);
  std::string nli(const std::string& request_body) override;
  std::string embed(const std::string& request_body) override;
  const JsonEndpoint& endpoint() const { return endpoint_; }

 private:
  JsonEndpoint endpoint_;
};

struct NliPair {
  std::string premise;
  std::string hypothesis;
};

struct NliResponse {
  std::string model;
  std::vector<NliProbs> results;
};

struct EmbedResponse {
  std::string model;
  std::size_t dim = 0;
  std::vector<std::vector<double>> vectors;
};

std::string nli_request_body(std::span<const NliPair> pairs);
std::string embed_request_body(std::span<const std::string> inputs);

// Validate a response against the wire contract and the expected item
// count. Malformed bodies, wrong counts, non-finite numbers and invalid
// probability triples raise Error(kProtocol) with the raw body attached.
NliResponse parse_nli_response(std::string_view body, std::size_t expected);
EmbedResponse parse_embed_response(std::string_view body, std::size_t expected);

struct ScorerOptions {
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
};

// Scores every (document sentence, summary sentence) pair. For entailment the
// premise is the document sentence and the hypothesis the summary sentence.
// Cached pairs are served from `cache` (may be null) and fresh results are
// written back. Any backend failure fails the whole matrix.
RelevanceMatrix build_relevance_matrix(const SentenceDoc& doc, const SentenceDoc& summary,
                                       const ScorerKind& kind, ScorerBackend* backend,
                                       Cache* cache, const ScorerOptions& options = {});

}  // namespace sifid
