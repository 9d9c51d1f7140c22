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

#include <json.hpp>

#include "helpers.hpp"
#include "segmentation.hpp"

using namespace sifid;
using namespace sifid::testing;
using json = nlohmann::json;

namespace {

std::vector<std::string> texts(const SentenceDoc& doc) {
  std::vector<std::string> out;
  for (const auto& s : doc.sentences) out.push_back(s.text);
  return out;
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

TEST_CASE("split: two plain sentences") {
  auto doc = split_sentences("Hello world. Second sentence.");
  CHECK(texts(doc) == std::vector<std::string>{"Hello world.", "Second sentence."});
  CHECK(doc.sentences[0].index == 0);
  CHECK(doc.sentences[1].index == 1);
}

TEST_CASE("split: empty and blank input") {
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("  \n\t ").empty());
}

TEST_CASE("split: abbreviation does not end a sentence") {
  auto doc = split_sentences("Dr. Smith arrived. He left.");
  CHECK(texts(doc) == std::vector<std::string>{"Dr. Smith arrived.", "He left."});
}

TEST_CASE("split: text without a terminator is one sentence") {
  auto doc = split_sentences("no terminator at all");
  REQUIRE(doc.size() == 1);
  CHECK(doc.sentences[0].text == "no terminator at all");
}

TEST_CASE("split: hand-labeled fixture") {
  std::ifstream in(fixture_path("sentences.jsonl"));
  REQUIRE(in);
  std::string line;
  std::size_t total = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json record = json::parse(line);
    const auto expected = record.at("sentences").get<std::vector<std::string>>();
    CAPTURE(line);
    CHECK(texts(split_sentences(record.at("text").get<std::string>())) == expected);
    total += expected.size();
  }
  CHECK(total == 50);
}

TEST_CASE("split: spans index the source") {
  const std::string text = "  First one.  Second one!\n\nThird?  ";
  auto doc = split_sentences(text);
  REQUIRE(doc.size() == 3);
  for (const auto& s : doc.sentences) {
    CHECK(text.substr(s.span.begin, s.span.end - s.span.begin) == s.text);
  }
  CHECK(doc.source == text);
}

TEST_CASE("split: custom abbreviation list") {
  SentenceSplitter plain(std::vector<std::string>{});
  CHECK(plain.split("Dr. Smith arrived.").size() == 2);
  SentenceSplitter custom(std::vector<std::string>{"Approx."});
  CHECK(custom.split("Approx. Ten people came.").size() == 1);
}

TEST_CASE("split: abbreviation file") {
  TempDir dir;
  write_file(dir.path() / "abbr.txt", "# comment\n\nZz.\n");
  auto splitter = SentenceSplitter::from_file((dir.path() / "abbr.txt").string());
  CHECK(splitter.split("Zz. Top plays. Dr. No.").size() == 3);
  CHECK(thrown_code([&] { SentenceSplitter::from_file((dir.path() / "missing").string()); }) ==
        ErrorCode::kConfig);
}

TEST_CASE("split: shipped abbreviation resource matches the built-in list") {
  auto from_file = SentenceSplitter::from_file(std::string(SIFID_RESOURCE_DIR) + "/abbreviations.txt");
  const std::string text = "Gen. Lee met Mr. Jones in Jan. before noon. They spoke at 3 p.m. Then left.";
  CHECK(texts(from_file.split(text)) == texts(split_sentences(text)));
}

TEST_CASE("split: long sentence warning") {
  std::string text(kLongSentenceChars + 10, 'a');
  text += ".";
  auto doc = split_sentences(text);
  CHECK(doc.size() == 1);
  CHECK(doc.warnings.size() == 1);
  CHECK(split_sentences("Short.").warnings.empty());
}

TEST_CASE("split properties over random text") {
  std::mt19937 rng(7);
  const std::vector<std::string> pieces = {"The", "cat", "sat", "Dr.", "U.S.", "on", "mat.",
                                           "Really?", "Yes!", "\"Quoted.\"", "J.", "42",
                                           "e.g.", "(aside).", "\n\n", "\n", "Émile", "Wait..."};
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    const int n = std::uniform_int_distribution<int>(0, 25)(rng);
    for (int k = 0; k < n; ++k) {
      text += pieces[rng() % pieces.size()];
      text += ' ';
    }
    CAPTURE(text);
    auto doc = split_sentences(text);
    std::size_t prev_end = 0;
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const auto& s = doc.sentences[i];
      CHECK(s.index == i);
      CHECK(!s.text.empty());
      CHECK(s.span.begin >= prev_end);
      CHECK(s.span.begin < s.span.end);
      CHECK(text.substr(s.span.begin, s.span.end - s.span.begin) == s.text);
      for (std::size_t g = prev_end; g < s.span.begin; ++g) CHECK(is_ws(text[g]));
      prev_end = s.span.end;
    }
    for (std::size_t g = prev_end; g < text.size(); ++g) CHECK(is_ws(text[g]));

    // Single-paragraph input: re-joining the sentences reproduces the split.
    std::string flat;
    for (char c : text) flat.push_back(c == '\n' ? ' ' : c);
    auto once = split_sentences(flat);
    std::string joined;
    for (const auto& s : once.sentences) joined += (joined.empty() ? "" : " ") + s.text;
    CHECK(texts(split_sentences(joined)) == texts(once));
  }
}
