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

#include "segmentation.hpp"

#include <fstream>
#include <optional>

#include "error.hpp"

namespace sifid {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_terminator(unsigned char c) { return c == '.' || c == '!' || c == '?'; }

// Decodes one UTF-8 code point at `pos`. Invalid sequences decode as the
// single byte value so scanning always advances.
char32_t decode_at(std::string_view s, std::size_t pos, std::size_t* len) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto cont = [&](std::size_t i) -> std::optional<unsigned> {
    if (pos + i >= s.size()) return std::nullopt;
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return std::nullopt;
    return b & 0x3F;
  };
  if (b0 < 0x80) {
    *len = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0) {
    if (auto c1 = cont(1)) {
      *len = 2;
      return (char32_t{b0 & 0x1Fu} << 6) | *c1;
    }
  } else if ((b0 & 0xF0) == 0xE0) {
    auto c1 = cont(1);
    auto c2 = cont(2);
    if (c1 && c2) {
      *len = 3;
      return (char32_t{b0 & 0x0Fu} << 12) | (*c1 << 6) | *c2;
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    auto c1 = cont(1);
    auto c2 = cont(2);
    auto c3 = cont(3);
    if (c1 && c2 && c3) {
      *len = 4;
      return (char32_t{b0 & 0x07u} << 18) | (*c1 << 12) | (*c2 << 6) | *c3;
    }
  }
  *len = 1;
  return b0;
}

bool is_closing_punct(char32_t c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}' || c == U'”' ||
         c == U'’' || c == U'»';
}

bool is_opening_quote(char32_t c) {
  return c == '"' || c == '\'' || c == '(' || c == '[' || c == U'“' || c == U'‘' ||
         c == U'«';
}

bool is_sentence_start(char32_t c) {
  if (c >= 'A' && c <= 'Z') return true;
  if (c >= '0' && c <= '9') return true;
  // Latin-1 uppercase letters.
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return true;
  return is_opening_quote(c);
}

bool is_token_lead(char32_t c) {
  return c == '"' || c == '\'' || c == '(' || c == '[' || c == U'“' || c == U'‘';
}

}  // namespace

const std::vector<std::string>& SentenceSplitter::default_abbreviations() {
  static const std::vector<std::string> kDefaults = {
      "Mr.",   "Mrs.",  "Ms.",   "Dr.",   "Prof.", "Sr.",   "Jr.",  "St.",  "Mt.",
      "Gen.",  "Gov.",  "Sen.",  "Rep.",  "Rev.",  "Sgt.",  "Lt.",  "Col.", "Capt.",
      "Cmdr.", "Adm.",  "Hon.",  "Pres.", "U.S.",  "U.K.",  "U.N.", "E.U.", "a.m.",
      "p.m.",  "etc.",  "e.g.",  "i.e.",  "vs.",   "cf.",   "al.",  "Fig.", "Figs.",
      "No.",   "Nos.",  "Vol.",  "pp.",   "Inc.",  "Ltd.",  "Co.",  "Corp.", "Jan.",
      "Feb.",  "Mar.",  "Apr.",  "Jun.",  "Jul.",  "Aug.",  "Sep.", "Sept.", "Oct.",
      "Nov.",  "Dec.",  "approx.", "est.", "Ave.", "Blvd.", "Rd.", "Dept.", "Univ."};
  return kDefaults;
}

SentenceSplitter::SentenceSplitter() : SentenceSplitter(default_abbreviations()) {}

SentenceSplitter::SentenceSplitter(std::vector<std::string> abbreviations)
    : abbreviations_(abbreviations.begin(), abbreviations.end()) {}

SentenceSplitter SentenceSplitter::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read abbreviation file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && is_space(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t first = 0;
    while (first < line.size() && is_space(static_cast<unsigned char>(line[first]))) ++first;
    line.erase(0, first);
    if (line.empty() || line.front() == '#') continue;
    tokens.push_back(line);
  }
  return SentenceSplitter(std::move(tokens));
}

bool SentenceSplitter::is_abbreviation(std::string_view token) const {
  if (abbreviations_.contains(std::string(token))) return true;
  // Single-letter initials: "J." in "J. Smith".
  return token.size() == 2 && token[0] >= 'A' && token[0] <= 'Z';
}

SentenceDoc SentenceSplitter::split(std::string_view text) const {
  SentenceDoc doc;
  doc.source = std::string(text);

  std::optional<std::size_t> start;  // first non-space byte of the open sentence
  std::size_t last_non_space = 0;    // one past the last non-space byte seen

  auto emit = [&]() {
    if (!start) return;
    Span span{*start, last_non_space};
    Sentence s{doc.sentences.size(), std::string(text.substr(span.begin, span.end - span.begin)),
               span};
    if (s.text.size() > kLongSentenceChars) {
      doc.warnings.push_back("sentence " + std::to_string(s.index) + " exceeds " +
                             std::to_string(kLongSentenceChars) + " characters");
    }
    doc.sentences.push_back(std::move(s));
    start.reset();
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto c = static_cast<unsigned char>(text[pos]);

    if (is_space(c)) {
      if (c == '\n' && start) {
        // Blank line: newline, optional horizontal space, newline.
        std::size_t probe = pos + 1;
        while (probe < text.size() && is_space(static_cast<unsigned char>(text[probe])) &&
               text[probe] != '\n') {
          ++probe;
        }
        if (probe < text.size() && text[probe] == '\n') emit();
      }
      ++pos;
      continue;
    }

    if (!start) start = pos;

    if (!is_terminator(c)) {
      std::size_t len = 1;
      decode_at(text, pos, &len);
      pos += len;
      last_non_space = pos;
      continue;
    }

    // Terminator run plus trailing closers.
    const std::size_t run_begin = pos;
    while (pos < text.size() && is_terminator(static_cast<unsigned char>(text[pos]))) ++pos;
    const bool single_period = pos - run_begin == 1 && text[run_begin] == '.';
    while (pos < text.size()) {
      std::size_t len = 1;
      const char32_t cp = decode_at(text, pos, &len);
      if (!is_closing_punct(cp)) break;
      pos += len;
    }
    last_non_space = pos;

    if (pos >= text.size() || !is_space(static_cast<unsigned char>(text[pos]))) continue;
    std::size_t next = pos;
    while (next < text.size() && is_space(static_cast<unsigned char>(text[next]))) ++next;
    if (next >= text.size()) continue;
    std::size_t len = 1;
    if (!is_sentence_start(decode_at(text, next, &len))) continue;

    if (single_period) {
      std::size_t token_begin = run_begin;
      while (token_begin > *start &&
             !is_space(static_cast<unsigned char>(text[token_begin - 1]))) {
        --token_begin;
      }
      std::string_view token = text.substr(token_begin, run_begin + 1 - token_begin);
      while (!token.empty()) {
        std::size_t lead_len = 1;
        if (!is_token_lead(decode_at(token, 0, &lead_len))) break;
        token.remove_prefix(lead_len);
      }
      if (is_abbreviation(token)) continue;
    }
    emit();
  }
  emit();
  return doc;
}

SentenceDoc split_sentences(std::string_view text) {
  static const SentenceSplitter kDefault;
  return kDefault.split(text);
}

}  // namespace sifid
