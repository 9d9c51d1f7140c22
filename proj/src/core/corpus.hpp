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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sifid {

// Label convention used everywhere: 1 = consistent (positive class),
// 0 = inconsistent.
inline constexpr int kConsistent = 1;
inline constexpr int kInconsistent = 0;

enum class Split { kValidation, kTest };

std::string_view split_name(Split split);
// Accepts "validation"/"val" and "test". Throws Error(kConfig) otherwise.
Split parse_split(std::string_view name);

// The six SummaC benchmarks plus "custom".
bool is_known_benchmark(std::string_view name);

struct Example {
  std::string id;
  std::string benchmark;
  std::string document;
  std::string summary;
  std::optional<int> gold_label;
  std::optional<std::string> cut;

  bool operator==(const Example&) const = default;
};

struct Dataset {
  std::string name;
  Split split = Split::kTest;
  std::vector<Example> examples;
};

struct Reject {
  std::size_t line_no = 0;  // 1-based
  std::string reason;
};

struct LoadResult {
  Dataset dataset;
  std::vector<Reject> rejects;
};

// Empty iff the example satisfies every invariant. Each entry reads
// "<field>: <rule>".
std::vector<std::string> validate_example(const Example& e);

// Parses line-delimited records. Throws Error(kDataset) when the file cannot
// be read or the benchmark name is unknown; malformed lines are collected in
// LoadResult::rejects.
LoadResult load_dataset(const std::string& path, std::string_view benchmark, Split split);
LoadResult parse_dataset(std::string_view contents, std::string_view benchmark, Split split);

// One record per example with `document`, `claim`, `label`, `cut` and `id`.
std::string serialize_dataset(const Dataset& dataset);
std::string serialize_rejects(const std::vector<Reject>& rejects);

}  // namespace sifid
