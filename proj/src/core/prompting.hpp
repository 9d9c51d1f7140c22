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

namespace sifid {

enum class TemplateBase { kGeneric, kPolytope };

std::string_view template_base_name(TemplateBase base);
TemplateBase parse_template_base(std::string_view name);

struct TemplateId {
  TemplateBase base = TemplateBase::kGeneric;
  bool cot = false;
  bool operator==(const TemplateId&) const = default;
};

inline constexpr std::string_view kAnswerSuffix = "Answer (Yes or No):";
inline constexpr std::string_view kCotSuffix =
    "Explain your reasoning step by step, then answer (Yes or No) on the final line:";

struct RenderedPrompt {
  TemplateId template_id;
  std::string text;
  std::size_t article_chars = 0;  // code points
  std::size_t summary_chars = 0;
};

// A judge prompt with one `{{ Article }}` slot followed by one
// `{{ Summary }}` slot (whitespace inside the braces is free). Templates end
// with kAnswerSuffix; the chain-of-thought variant swaps that suffix for
// kCotSuffix and leaves the rest of the text untouched.
class PromptTemplate {
 public:
  // Throws Error(kConfig) when the slots are missing, repeated or out of
  // order. One trailing newline is dropped.
  static PromptTemplate parse(std::string body);
  static PromptTemplate from_file(const std::string& path);
  static const PromptTemplate& builtin(TemplateBase base);

  // Throws Error(kRender) for an empty article or summary, or when `cot` is
  // requested for a template that does not end with kAnswerSuffix.
  RenderedPrompt render(TemplateId id, std::string_view article, std::string_view summary) const;

  const std::string& body() const { return body_; }

 private:
  std::string body_;
  std::string head_;    // text before the article slot
  std::string middle_;  // between the slots
  std::string tail_;    // after the summary slot
};

RenderedPrompt render(TemplateId id, std::string_view article, std::string_view summary);

std::size_t count_code_points(std::string_view text);

}  // namespace sifid
