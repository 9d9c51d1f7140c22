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

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace sifid {

enum class CacheNamespace { kNli, kEmbed, kJudge };

std::string_view namespace_name(CacheNamespace ns);

struct CacheKey {
  CacheNamespace ns = CacheNamespace::kJudge;
  std::string digest;  // lowercase hex SHA-256 of the canonical request payload

  static CacheKey make(CacheNamespace ns, std::string_view canonical_payload);
  bool operator==(const CacheKey&) const = default;
};

struct CacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t writes = 0;
  std::size_t write_failures = 0;
  std::size_t corrupt = 0;
};

// Content-addressed store rooted at a directory:
//
//   <root>/<namespace>/<first 2 hex>/<digest>
//
// Each entry file starts with a one-line JSON header carrying the value's
// size and SHA-256, followed by the raw value bytes. Writes go to a temp
// file in the same directory and are renamed into place, so readers never
// observe a partial entry. An entry whose header does not match its bytes is
// reported as a miss.
class Cache {
 public:
  explicit Cache(std::filesystem::path root);

  Cache(const Cache&) = delete;
  Cache& operator=(const Cache&) = delete;

  std::optional<std::string> get(const CacheKey& key) const;

  // Returns false (after logging a warning) when the entry could not be
  // committed; the caller proceeds uncached.
  bool put(const CacheKey& key, std::string_view value, std::string_view model = {});

  // Removes every entry. Returns the number of entry files removed.
  std::size_t clear();

  std::filesystem::path entry_path(const CacheKey& key) const;
  const std::filesystem::path& root() const { return root_; }
  CacheStats stats() const;

 private:
  std::filesystem::path root_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
  mutable std::atomic<std::size_t> corrupt_{0};
  std::atomic<std::size_t> writes_{0};
  std::atomic<std::size_t> write_failures_{0};
};

}  // namespace sifid
