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
#include <vector>

#include "scorer.hpp"
#include "segmentation.hpp"

namespace sifid {

// Row-wise maxima of a relevance matrix: one value per document sentence.
struct PooledScores {
  std::vector<double> values;
};

enum class EmptyFallback { kFullDocument, kEmptyError };

struct FilterConfig {
  double beta = 0.0;
  std::size_t window_radius = 1;
  EmptyFallback empty_fallback = EmptyFallback::kFullDocument;
};

// Threshold defaults per scorer: 0.0 for entailment, 0.5 for similarity.
// The mock scorer only produces +/-1 and uses 0.0.
double default_beta(ScorerVariant variant);

struct FilteredDocument {
  std::vector<std::size_t> kept_indices;  // strictly increasing
  std::string text;                       // kept sentences joined by single spaces
  double removal_rate = 0.0;              // 1 - kept / M
  bool fallback_used = false;
};

PooledScores max_pool_rows(const RelevanceMatrix& matrix);

// Index k is selected iff some x has pooled[x] > beta (strictly) and
// |k - x| <= window_radius. The result is sorted and deduplicated; it may be
// empty.
std::vector<std::size_t> select_indices(const PooledScores& pooled, const FilterConfig& cfg);

// Joins the kept sentences in document order. An empty selection falls back
// to the whole document or raises Error(kEmptyFilter), per the config.
FilteredDocument assemble_filtered(const SentenceDoc& doc, const std::vector<std::size_t>& kept,
                                   const FilterConfig& cfg);

// A pass-through result: every sentence kept, removal rate 0.
FilteredDocument unfiltered(const SentenceDoc& doc);

}  // namespace sifid
