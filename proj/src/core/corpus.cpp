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

#include "corpus.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "error.hpp"

namespace sifid {
namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 7> kBenchmarks = {
    "cogensumm", "xsumfaith", "polytope", "factcc", "summeval", "frank", "custom"};

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

// Returns the reason the record was rejected, or an empty string.
std::string parse_record(std::string_view line, Example& out) {
  json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (record.is_discarded()) return "malformed record";
  if (!record.is_object()) return "record is not an object";

  auto doc = record.find("document");
  if (doc == record.end()) return "document: missing";
  if (!doc->is_string()) return "document: not a string";
  out.document = doc->get<std::string>();

  auto claim = record.find("claim");
  if (claim == record.end()) claim = record.find("summary");
  if (claim == record.end()) return "claim: missing";
  if (!claim->is_string()) return "claim: not a string";
  out.summary = claim->get<std::string>();

  if (auto label = record.find("label"); label != record.end() && !label->is_null()) {
    if (!label->is_number_integer()) return "label: not binary";
    const auto value = label->get<long long>();
    if (value != 0 && value != 1) return "label: not binary";
    out.gold_label = static_cast<int>(value);
  }
  if (auto cut = record.find("cut"); cut != record.end() && !cut->is_null()) {
    if (!cut->is_string()) return "cut: not a string";
    out.cut = cut->get<std::string>();
  }
  if (auto id = record.find("id"); id != record.end() && !id->is_null()) {
    if (id->is_string()) {
      out.id = id->get<std::string>();
    } else if (id->is_number_integer()) {
      out.id = std::to_string(id->get<long long>());
    } else {
      return "id: not a string";
    }
    if (out.id.empty()) return "id: empty";
  }
  return {};
}

}  // namespace

std::string_view split_name(Split split) {
  return split == Split::kValidation ? "validation" : "test";
}

Split parse_split(std::string_view name) {
  if (name == "validation" || name == "val") return Split::kValidation;
  if (name == "test") return Split::kTest;
  throw Error(ErrorCode::kConfig,
              "unknown split '" + std::string(name) + "' (expected validation or test)");
}

bool is_known_benchmark(std::string_view name) {
  for (auto b : kBenchmarks) {
    if (b == name) return true;
  }
  return false;
}

std::vector<std::string> validate_example(const Example& e) {
  std::vector<std::string> violations;
  if (e.id.empty()) violations.emplace_back("id: empty");
  if (is_blank(e.document)) violations.emplace_back("document: empty");
  if (is_blank(e.summary)) violations.emplace_back("summary: empty");
  if (e.gold_label && *e.gold_label != 0 && *e.gold_label != 1) {
    violations.emplace_back("gold_label: not binary");
  }
  return violations;
}

LoadResult parse_dataset(std::string_view contents, std::string_view benchmark, Split split) {
  if (!is_known_benchmark(benchmark)) {
    throw Error(ErrorCode::kDataset, "unknown benchmark '" + std::string(benchmark) + "'");
  }
  LoadResult result;
  result.dataset.name = std::string(benchmark);
  result.dataset.split = split;

  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (is_blank(line)) continue;

    Example e;
    e.benchmark = std::string(benchmark);
    std::string reason = parse_record(line, e);
    if (reason.empty() && e.id.empty()) {
      e.id = std::string(benchmark) + ":" + std::string(split_name(split)) + ":" +
             std::to_string(line_no);
    }
    if (reason.empty()) {
      auto violations = validate_example(e);
      if (!violations.empty()) reason = violations.front();
    }
    if (reason.empty() && !seen.insert(e.id).second) reason = "id: duplicate";
    if (!reason.empty()) {
      result.rejects.push_back({line_no, std::move(reason)});
      continue;
    }
    result.dataset.examples.push_back(std::move(e));
  }
  return result;
}

LoadResult load_dataset(const std::string& path, std::string_view benchmark, Split split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kDataset, "cannot read dataset file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::kDataset, "error reading dataset file '" + path + "'");
  return parse_dataset(buffer.str(), benchmark, split);
}

std::string serialize_dataset(const Dataset& dataset) {
  std::string out;
  for (const auto& e : dataset.examples) {
    json record = {{"id", e.id}, {"document", e.document}, {"claim", e.summary}};
    if (e.gold_label) record["label"] = *e.gold_label;
    if (e.cut) record["cut"] = *e.cut;
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::string serialize_rejects(const std::vector<Reject>& rejects) {
  std::string out;
  for (const auto& r : rejects) {
    out += json{{"line_no", r.line_no}, {"reason", r.reason}}.dump();
    out += '\n';
  }
  return out;
}

}  // namespace sifid
