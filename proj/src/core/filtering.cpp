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

#include "filtering.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace sifid {

double default_beta(ScorerVariant variant) {
  return variant == ScorerVariant::kSimilarity ? 0.5 : 0.0;
}

PooledScores max_pool_rows(const RelevanceMatrix& matrix) {
  if (matrix.rows() == 0 || matrix.cols() == 0) {
    throw Error(ErrorCode::kInvalidInput, "max pooling needs a non-empty matrix");
  }
  PooledScores pooled;
  pooled.values.reserve(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto row = matrix.row(i);
    pooled.values.push_back(*std::max_element(row.begin(), row.end()));
  }
  return pooled;
}

std::vector<std::size_t> select_indices(const PooledScores& pooled, const FilterConfig& cfg) {
  if (!std::isfinite(cfg.beta)) throw Error(ErrorCode::kInvalidInput, "beta must be finite");
  const std::size_t m = pooled.values.size();
  std::vector<std::size_t> kept;
  // Windows are visited in increasing x, so tracking the first index not yet
  // emitted is enough to merge overlaps.
  std::size_t next_free = 0;
  for (std::size_t x = 0; x < m; ++x) {
    if (!(pooled.values[x] > cfg.beta)) continue;
    const std::size_t lo = x > cfg.window_radius ? x - cfg.window_radius : 0;
    const std::size_t hi = std::min(m - 1, x + std::min(cfg.window_radius, m));
    for (std::size_t k = std::max(lo, next_free); k <= hi; ++k) kept.push_back(k);
    next_free = std::max(next_free, hi + 1);
  }
  return kept;
}

FilteredDocument assemble_filtered(const SentenceDoc& doc, const std::vector<std::size_t>& kept,
                                   const FilterConfig& cfg) {
  const std::size_t m = doc.size();
  if (m == 0) throw Error(ErrorCode::kInvalidInput, "document has no sentences");
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (kept[k] >= m || (k > 0 && kept[k] <= kept[k - 1])) {
      throw Error(ErrorCode::kInvalidInput, "kept indices must be strictly increasing and < M");
    }
  }
  if (kept.empty()) {
    if (cfg.empty_fallback == EmptyFallback::kEmptyError) {
      throw Error(ErrorCode::kEmptyFilter, "no document sentence scored above the threshold");
    }
    FilteredDocument out = unfiltered(doc);
    out.fallback_used = true;
    return out;
  }
  FilteredDocument out;
  out.kept_indices = kept;
  for (std::size_t k : kept) {
    if (!out.text.empty()) out.text += ' ';
    out.text += doc.sentences[k].text;
  }
  out.removal_rate = static_cast<double>(m - kept.size()) / static_cast<double>(m);
  return out;
}

FilteredDocument unfiltered(const SentenceDoc& doc) {
  FilteredDocument out;
  for (const auto& s : doc.sentences) {
    out.kept_indices.push_back(s.index);
    if (!out.text.empty()) out.text += ' ';
    out.text += s.text;
  }
  out.removal_rate = 0.0;
  return out;
}

}  // namespace sifid
