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
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace sifid {

struct Span {
  std::size_t begin = 0;  // byte offsets, half-open
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

struct Sentence {
  std::size_t index = 0;
  std::string text;
  Span span;
};

struct SentenceDoc {
  std::string source;
  std::vector<Sentence> sentences;
  std::vector<std::string> warnings;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

inline constexpr std::size_t kLongSentenceChars = 2000;

// Rule-based splitter. A run of '.', '!' or '?' (plus any closing quotes or
// brackets) ends a sentence when it is followed by whitespace and then an
// uppercase letter, a digit or an opening quote. A '.' that closes a listed
// abbreviation or a single-letter initial never ends a sentence. A blank
// line always ends one.
class SentenceSplitter {
 public:
  // Uses the built-in abbreviation list.
  SentenceSplitter();
  explicit SentenceSplitter(std::vector<std::string> abbreviations);

  // One token per line; blank lines and lines starting with '#' are skipped.
  static SentenceSplitter from_file(const std::string& path);
  static const std::vector<std::string>& default_abbreviations();

  SentenceDoc split(std::string_view text) const;

 private:
  bool is_abbreviation(std::string_view token) const;

  std::unordered_set<std::string> abbreviations_;
};

// Splits with the default splitter.
SentenceDoc split_sentences(std::string_view text);

}  // namespace sifid
