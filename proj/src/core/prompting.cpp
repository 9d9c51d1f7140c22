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

#include "prompting.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "error.hpp"

namespace sifid {
namespace {

constexpr std::string_view kGenericTemplate =
    "Decide if the following summary is consistent with the corresponding article. "
    "Note that consistency means all information in the summary is supported by the article.\n"
    "Article:\n"
    "{{ Article }}\n"
    "Summary:\n"
    "{{ Summary }}\n"
    "Answer (Yes or No):";

constexpr std::string_view kPolytopeTemplate =
    "Decide if the following summary have any of the specified problems in relation to the "
    "corresponding article.\n"
    "The problems are categorized as omission, addition, or inaccuracy. Omission means Key "
    "point is missing from the summary. Addition means Unnecessary and irrelevant snippets "
    "from the Article are included in the summary. Inaccuracy means some information in the "
    "summary is not supported by the article.\n"
    "Article:\n"
    "{{ Article }}\n"
    "Summary:\n"
    "{{ Summary }}\n"
    "If the summary has any of the above problems, answer 'No'. Otherwise, answer 'Yes'. "
    "Answer (Yes or No):";

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

}  // namespace

std::string_view template_base_name(TemplateBase base) {
  return base == TemplateBase::kPolytope ? "polytope" : "generic";
}

TemplateBase parse_template_base(std::string_view name) {
  if (name == "generic") return TemplateBase::kGeneric;
  if (name == "polytope") return TemplateBase::kPolytope;
  throw Error(ErrorCode::kConfig, "unknown template '" + std::string(name) + "'");
}

std::size_t count_code_points(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

PromptTemplate PromptTemplate::parse(std::string body) {
  if (!body.empty() && body.back() == '\n') body.pop_back();
  if (!body.empty() && body.back() == '\r') body.pop_back();

  static const std::regex kArticle(R"(\{\{\s*Article\s*\}\})");
  static const std::regex kSummary(R"(\{\{\s*Summary\s*\}\})");
  auto find_one = [&](const std::regex& re, const char* name) {
    auto begin = std::sregex_iterator(body.begin(), body.end(), re);
    const auto count = std::distance(begin, std::sregex_iterator());
    if (count != 1) {
      throw Error(ErrorCode::kConfig, std::string("template must contain exactly one {{ ") +
                                          name + " }} placeholder");
    }
    return std::make_pair(static_cast<std::size_t>(begin->position()),
                          static_cast<std::size_t>(begin->length()));
  };
  const auto [a_pos, a_len] = find_one(kArticle, "Article");
  const auto [s_pos, s_len] = find_one(kSummary, "Summary");
  if (s_pos < a_pos + a_len) {
    throw Error(ErrorCode::kConfig, "template must place the article before the summary");
  }

  PromptTemplate t;
  t.head_ = body.substr(0, a_pos);
  t.middle_ = body.substr(a_pos + a_len, s_pos - a_pos - a_len);
  t.tail_ = body.substr(s_pos + s_len);
  t.body_ = std::move(body);
  return t;
}

PromptTemplate PromptTemplate::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read template file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const PromptTemplate& PromptTemplate::builtin(TemplateBase base) {
  static const PromptTemplate kGeneric = parse(std::string(kGenericTemplate));
  static const PromptTemplate kPolytope = parse(std::string(kPolytopeTemplate));
  return base == TemplateBase::kPolytope ? kPolytope : kGeneric;
}

RenderedPrompt PromptTemplate::render(TemplateId id, std::string_view article,
                                      std::string_view summary) const {
  if (is_blank(article)) throw Error(ErrorCode::kRender, "cannot render prompt: empty article");
  if (is_blank(summary)) throw Error(ErrorCode::kRender, "cannot render prompt: empty summary");

  std::string tail = tail_;
  if (id.cot) {
    if (!tail.ends_with(kAnswerSuffix)) {
      throw Error(ErrorCode::kRender,
                  "chain-of-thought needs a template ending with \"Answer (Yes or No):\"");
    }
    tail.replace(tail.size() - kAnswerSuffix.size(), kAnswerSuffix.size(), kCotSuffix);
  }

  RenderedPrompt out;
  out.template_id = id;
  out.text.reserve(head_.size() + article.size() + middle_.size() + summary.size() + tail.size());
  out.text += head_;
  out.text += article;
  out.text += middle_;
  out.text += summary;
  out.text += tail;
  out.article_chars = count_code_points(article);
  out.summary_chars = count_code_points(summary);
  return out;
}

RenderedPrompt render(TemplateId id, std::string_view article, std::string_view summary) {
  return PromptTemplate::builtin(id.base).render(id, article, summary);
}

}  // namespace sifid
