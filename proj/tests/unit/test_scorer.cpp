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

#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "cache.hpp"
#include "fake_servers.hpp"
#include "helpers.hpp"
#include "scorer.hpp"

using namespace sifid;
using namespace sifid::testing;
using json = nlohmann::json;

namespace {

// Serves canned bodies without HTTP and counts calls.
class ScriptedBackend : public ScorerBackend {
 public:
  std::string nli(const std::string& body) override {
    ++nli_calls;
    const json req = json::parse(body);
    json results = json::array();
    for (const auto& p : req.at("pairs")) {
      const auto probs = fake_nli(p.at("premise"), p.at("hypothesis"));
      results.push_back({{"entailment", probs.entailment},
                         {"neutral", probs.neutral},
                         {"contradiction", probs.contradiction}});
      ++pairs;
    }
    return json{{"model", "scripted"}, {"results", results}}.dump();
  }
  std::string embed(const std::string& body) override {
    ++embed_calls;
    const json req = json::parse(body);
    json vectors = json::array();
    for (const auto& text : req.at("inputs")) vectors.push_back(fake_embedding(text));
    return json{{"model", "scripted-embed"}, {"dim", 8}, {"vectors", vectors}}.dump();
  }
  int nli_calls = 0;
  int embed_calls = 0;
  int pairs = 0;
};

SentenceDoc doc_of(const std::vector<std::string>& sentences) {
  std::string text;
  for (const auto& s : sentences) text += s + " ";
  auto doc = split_sentences(text);
  REQUIRE(doc.size() == sentences.size());
  return doc;
}

}  // namespace

TEST_CASE("net entailment examples") {
  CHECK(net_entailment({0.90, 0.05, 0.05}) == doctest::Approx(0.85).epsilon(1e-12));
  CHECK(net_entailment({0.40, 0.20, 0.40}) == 0.0);
  CHECK(net_entailment({1.0, 0.0, 0.0}) == 1.0);
  CHECK(net_entailment({0.0, 0.0, 1.0}) == -1.0);
}

TEST_CASE("probability triple validation") {
  CHECK(is_valid({0.2, 0.3, 0.5}));
  CHECK(is_valid({0.2, 0.3, 0.50005}));
  CHECK_FALSE(is_valid({0.2, 0.3, 0.6}));
  CHECK_FALSE(is_valid({1.2, -0.1, -0.1}));
  CHECK_FALSE(is_valid({NAN, 0.5, 0.5}));
}

TEST_CASE("cosine examples and errors") {
  const std::vector<double> a{0.6, 0.8}, x{1, 0}, y{0, 1}, d{1, 1};
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(cosine_similarity(x, y)) < 1e-15);
  CHECK(std::abs(cosine_similarity(x, d) - 0.70710678) < 1e-8);
  const std::vector<double> zero{0, 0}, empty{}, three{1, 2, 3};
  CHECK(thrown_code([&] { cosine_similarity(x, zero); }) == ErrorCode::kScoring);
  CHECK(thrown_code([&] { cosine_similarity(empty, empty); }) == ErrorCode::kScoring);
  CHECK(thrown_code([&] { cosine_similarity(x, three); }) == ErrorCode::kScoring);
}

TEST_CASE("cosine properties") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + rng() % 64;
    std::vector<double> a(dim), b(dim);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    const double ab = cosine_similarity(a, b);
    CHECK(std::abs(cosine_similarity(a, a) - 1.0) <= 1e-6);
    CHECK(std::abs(ab - cosine_similarity(b, a)) <= 1e-9);
    CHECK(ab >= -1.0);
    CHECK(ab <= 1.0);
    std::vector<double> scaled = a;
    for (auto& v : scaled) v *= 3.5;
    CHECK(std::abs(cosine_similarity(scaled, b) - ab) <= 1e-9);
  }
}

TEST_CASE("mock score") {
  CHECK(mock_score("alpha beta", "alpha one") == 1.0);
  CHECK(mock_score("gamma delta", "alpha one") == -1.0);
  CHECK(mock_score("ALPHA!", "the alpha") == 1.0);
  CHECK(mock_score("four four", "four") == -1.0);
  CHECK(mock_score("alphabet", "alpha") == -1.0);
}

TEST_CASE("mock relevance matrix 2x2") {
  auto doc = split_sentences("alpha beta.\nGamma delta.");
  auto summ = split_sentences("alpha one. Nothing here.");
  auto m = build_relevance_matrix(doc, summ, ScorerKind{}, nullptr, nullptr);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 2);
  CHECK(m.scores() == std::vector<double>{1.0, -1.0, -1.0, -1.0});
  CHECK(m.kind().model_id == "mock");
}

TEST_CASE("relevance matrix validation") {
  ScorerKind k;
  CHECK(thrown_code([&] { RelevanceMatrix(2, 2, {0, 0, 0}, k); }) == ErrorCode::kInvalidInput);
  CHECK(thrown_code([&] { RelevanceMatrix(1, 1, {1.5}, k); }) == ErrorCode::kInvalidInput);
  CHECK(thrown_code([&] { RelevanceMatrix(1, 1, {NAN}, k); }) == ErrorCode::kInvalidInput);
  RelevanceMatrix ok(1, 2, {-1.0, 1.0}, k);
  CHECK(ok.row(0)[1] == 1.0);
}

TEST_CASE("wire fixtures: request bodies") {
  std::vector<NliPair> pairs = {{"The mayor opened the bridge.", "A bridge was opened."},
                                {"Traffic was light.", "A bridge was opened."}};
  CHECK(json::parse(nli_request_body(pairs)) ==
        json::parse(read_file(fixture_path("wire/nli_request.json"))));
  std::vector<std::string> inputs = {"The mayor opened the bridge.", "A bridge was opened."};
  CHECK(json::parse(embed_request_body(inputs)) ==
        json::parse(read_file(fixture_path("wire/embed_request.json"))));
}

TEST_CASE("wire fixtures: good responses") {
  auto nli = parse_nli_response(read_file(fixture_path("wire/nli_response.json")), 2);
  CHECK(nli.model == "roberta-large-mnli");
  REQUIRE(nli.results.size() == 2);
  CHECK(nli.results[0].entailment == 0.92);
  CHECK(nli.results[1].contradiction == 0.20);
  for (const auto& r : nli.results) {
    const double s = net_entailment(r);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
  }
  auto emb = parse_embed_response(read_file(fixture_path("wire/embed_response.json")), 2);
  CHECK(emb.model == "all-mpnet-base-v2");
  CHECK(emb.dim == 3);
  CHECK(cosine_similarity(emb.vectors[0], emb.vectors[1]) == doctest::Approx(0.6));
}

TEST_CASE("wire fixtures: malformed responses are protocol errors") {
  for (const char* name : {"nli_sum.json", "nli_count.json", "nli_no_model.json", "nli_range.json",
                           "nli_truncated.json", "not_json.txt"}) {
    CAPTURE(name);
    const std::string body = read_file(fixture_path(std::string("wire/bad/") + name));
    try {
      parse_nli_response(body, 2);
      FAIL("expected a protocol error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kProtocol);
      CHECK(e.body() == body);
    }
  }
  for (const char* name : {"embed_dim.json", "embed_count.json", "not_json.txt"}) {
    CAPTURE(name);
    const std::string body = read_file(fixture_path(std::string("wire/bad/") + name));
    CHECK(thrown_code([&] { parse_embed_response(body, 2); }) == ErrorCode::kProtocol);
  }
}

TEST_CASE("entailment matrix uses premise=document, hypothesis=summary") {
  ScriptedBackend backend;
  auto doc = doc_of({"The cat sat on the mat.", "Dogs bark loudly."});
  auto summ = doc_of({"The cat sat.", "Birds sing."});
  auto m = build_relevance_matrix(doc, summ, {ScorerVariant::kEntailment, "m"}, &backend, nullptr);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const auto p = fake_nli(doc.sentences[i].text, summ.sentences[j].text);
      CHECK(m.at(i, j) == p.entailment - p.contradiction);
    }
  }
  CHECK(m.at(0, 0) == doctest::Approx(0.95 - 0.05));
  CHECK(m.kind().model_id == "scripted");
  CHECK(backend.pairs == 4);
}

TEST_CASE("similarity matrix is cosine of embeddings") {
  ScriptedBackend backend;
  auto doc = doc_of({"The cat sat on the mat.", "Dogs bark loudly."});
  auto summ = doc_of({"The cat sat."});
  auto m = build_relevance_matrix(doc, summ, {ScorerVariant::kSimilarity, "m"}, &backend, nullptr);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto a = fake_embedding(doc.sentences[i].text);
    const auto b = fake_embedding(summ.sentences[0].text);
    CHECK(m.at(i, 0) == doctest::Approx(cosine_similarity(a, b)).epsilon(1e-12));
  }
  CHECK(m.kind().model_id == "scripted-embed");
}

TEST_CASE("batching and caching do not change the matrix") {
  std::mt19937 rng(3);
  const std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta", "river", "stone",
                                          "cloud", "night", "storm", "green"};
  auto sentence = [&] {
    std::string s = "Word";
    const int n = 1 + rng() % 6;
    for (int k = 0; k < n; ++k) s += " " + vocab[rng() % vocab.size()];
    return s + ".";
  };
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> d, s;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 12); ++k) d.push_back(sentence());
    for (int k = 0; k < 1 + static_cast<int>(rng() % 4); ++k) s.push_back(sentence());
    auto doc = doc_of(d);
    auto summ = doc_of(s);
    for (auto variant : {ScorerVariant::kEntailment, ScorerVariant::kSimilarity}) {
      ScriptedBackend reference_backend;
      auto reference =
          build_relevance_matrix(doc, summ, {variant, "m"}, &reference_backend, nullptr, {1024, 1});
      TempDir dir;
      Cache cache(dir.path());
      for (std::size_t batch : {std::size_t{1}, std::size_t{3}, std::size_t{7}}) {
        ScriptedBackend b;
        auto m = build_relevance_matrix(doc, summ, {variant, "m"}, &b, &cache, {batch, 3});
        CHECK(m.scores() == reference.scores());
      }
      ScriptedBackend cold;
      auto warm = build_relevance_matrix(doc, summ, {variant, "m"}, &cold, &cache);
      CHECK(warm.scores() == reference.scores());
      CHECK(warm.kind() == reference.kind());
      CHECK(cold.nli_calls + cold.embed_calls == 0);
    }
  }
}

TEST_CASE("scorer over the fake sidecar") {
  FakeScorerServer server;
  EndpointConfig cfg{server.url(), "secret", std::chrono::seconds(5), {}};
  HttpScorerBackend backend(cfg);
  auto doc = doc_of({"The cat sat on the mat.", "Dogs bark.", "The mat is red."});
  auto summ = doc_of({"The cat sat.", "A red mat."});

  SUBCASE("entailment, batched") {
    auto m = build_relevance_matrix(doc, summ, {ScorerVariant::kEntailment, "nli"}, &backend,
                                    nullptr, {2, 2});
    CHECK(m.rows() == 3);
    CHECK(m.cols() == 2);
    CHECK(server.pairs_scored() == 6);
    CHECK(server.largest_batch() <= 2);
    CHECK(server.last_authorization() == "Bearer secret");
    CHECK(m.kind().model_id == "fake-nli");
  }
  SUBCASE("uniform probabilities give an all-zero matrix") {
    server.set_uniform(true);
    auto m = build_relevance_matrix(doc, summ, {ScorerVariant::kEntailment, "nli"}, &backend,
                                    nullptr);
    for (double v : m.scores()) CHECK(v == 0.0);
  }
  SUBCASE("similarity self match") {
    auto one = doc_of({"A man sleeps."});
    auto m = build_relevance_matrix(one, one, {ScorerVariant::kSimilarity, "emb"}, &backend,
                                    nullptr);
    CHECK(std::abs(m.at(0, 0) - 1.0) <= 1e-6);
  }
  SUBCASE("zero embedding names the sentence") {
    server.set_zero_marker("Dogs");
    try {
      build_relevance_matrix(doc, summ, {ScorerVariant::kSimilarity, "emb"}, &backend, nullptr);
      FAIL("expected a scoring error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kScoring);
      CHECK(e.sentence_index() == std::optional<std::size_t>(1));
    }
  }
  SUBCASE("malformed payload") {
    server.queue({200, read_file(fixture_path("wire/bad/nli_sum.json"))});
    CHECK(thrown_code([&] {
            build_relevance_matrix(doc_of({"One."}), doc_of({"Two."}),
                                   {ScorerVariant::kEntailment, "nli"}, &backend, nullptr);
          }) == ErrorCode::kProtocol);
  }
}
