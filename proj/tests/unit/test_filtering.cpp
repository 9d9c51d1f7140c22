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

#include <algorithm>

#include "filtering.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace sifid;
using namespace sifid::testing;

namespace {

std::vector<std::size_t> select(std::vector<double> pooled, double beta, std::size_t radius) {
  return select_indices(PooledScores{std::move(pooled)}, FilterConfig{beta, radius, {}});
}

SentenceDoc ten_sentences() {
  std::string text;
  for (int k = 0; k < 10; ++k) text += "Sentence " + std::to_string(k) + " here. ";
  auto doc = split_sentences(text);
  REQUIRE(doc.size() == 10);
  return doc;
}

bool subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("row max pooling") {
  RelevanceMatrix m(2, 2, {0.1, 0.9, 0.3, 0.2}, {});
  CHECK(max_pool_rows(m).values == std::vector<double>{0.9, 0.3});
  RelevanceMatrix col(3, 1, {0.5, -0.2, 1.0}, {});
  CHECK(max_pool_rows(col).values == std::vector<double>{0.5, -0.2, 1.0});
}

TEST_CASE("row max pooling matches a scan") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> s(35);
    for (auto& v : s) v = u(rng);
    auto pooled = max_pool_rows(RelevanceMatrix(7, 5, s, {})).values;
    for (std::size_t i = 0; i < 7; ++i) {
      double best = s[i * 5];
      for (std::size_t j = 1; j < 5; ++j) best = std::max(best, s[i * 5 + j]);
      CHECK(pooled[i] == best);
    }
  }
}

TEST_CASE("select examples") {
  std::vector<double> p(10, -1.0);
  p[7] = 0.5;
  CHECK(select(p, 0.0, 1) == std::vector<std::size_t>{6, 7, 8});
  CHECK(select({0.9, -1, -1, -1, -1}, 0.0, 1) == std::vector<std::size_t>{0, 1});
  std::vector<double> q(10, -1.0);
  q[2] = q[4] = 1.0;
  CHECK(select(q, 0.0, 1) == std::vector<std::size_t>{1, 2, 3, 4, 5});
  CHECK(select(std::vector<double>(6, -0.5), 0.0, 1).empty());
  CHECK(select({0.0, 0.0}, 0.0, 1).empty());
  CHECK(select({0.3, -1, -1, -1}, 0.0, 0) == std::vector<std::size_t>{0});
  CHECK(select({}, 0.0, 1).empty());
  CHECK(thrown_code([] { select({0.1}, NAN, 1); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("select matches the brute-force oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = rng() % 51;
    std::vector<double> p(m);
    for (auto& v : p) v = (rng() % 5 == 0) ? 0.0 : u(rng);
    const double beta = (rng() % 4 == 0) ? 0.0 : u(rng);
    const std::size_t radius = rng() % 6;
    CHECK(select(p, beta, radius) == brute_force_select(p, beta, radius));
  }
}

TEST_CASE("select is monotone in beta and radius") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> p(1 + rng() % 50);
    for (auto& v : p) v = u(rng);
    double b1 = u(rng), b2 = u(rng);
    if (b1 > b2) std::swap(b1, b2);
    const std::size_t r = rng() % 5;
    CHECK(subset(select(p, b2, r), select(p, b1, r)));
    CHECK(subset(select(p, b1, r), select(p, b1, r + 1)));
  }
}

TEST_CASE("assemble filtered document") {
  auto doc = ten_sentences();
  FilterConfig cfg;
  auto f = assemble_filtered(doc, {6, 7, 8}, cfg);
  CHECK(f.removal_rate == 0.7);
  CHECK(f.text == "Sentence 6 here. Sentence 7 here. Sentence 8 here.");
  CHECK_FALSE(f.fallback_used);

  auto all = assemble_filtered(doc, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, cfg);
  CHECK(all.removal_rate == 0.0);
  std::string joined;
  for (const auto& s : doc.sentences) joined += (joined.empty() ? "" : " ") + s.text;
  CHECK(all.text == joined);

  auto fallback = assemble_filtered(doc, {}, cfg);
  CHECK(fallback.fallback_used);
  CHECK(fallback.kept_indices.size() == 10);
  CHECK(fallback.removal_rate == 0.0);
  CHECK(fallback.text == joined);

  cfg.empty_fallback = EmptyFallback::kEmptyError;
  CHECK(thrown_code([&] { assemble_filtered(doc, {}, cfg); }) == ErrorCode::kEmptyFilter);
  CHECK(thrown_code([&] { assemble_filtered(doc, {10}, FilterConfig{}); }) ==
        ErrorCode::kInvalidInput);
  CHECK(thrown_code([&] { assemble_filtered(doc, {3, 2}, FilterConfig{}); }) ==
        ErrorCode::kInvalidInput);
}

TEST_CASE("unfiltered document and default betas") {
  auto doc = ten_sentences();
  auto u = unfiltered(doc);
  CHECK(u.kept_indices.size() == 10);
  CHECK(u.removal_rate == 0.0);
  CHECK_FALSE(u.fallback_used);
  CHECK(default_beta(ScorerVariant::kEntailment) == 0.0);
  CHECK(default_beta(ScorerVariant::kSimilarity) == 0.5);
  CHECK(default_beta(ScorerVariant::kMock) == 0.0);
}

TEST_CASE("removal rate matches kept count") {
  auto doc = ten_sentences();
  std::mt19937 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < 10; ++k) {
      if (rng() % 2) kept.push_back(k);
    }
    if (kept.empty()) continue;
    auto f = assemble_filtered(doc, kept, FilterConfig{});
    CHECK(f.kept_indices == kept);
    CHECK(f.removal_rate == static_cast<double>(10 - kept.size()) / 10.0);
  }
}
