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

#include "cache.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "error.hpp"
#include "hashing.hpp"

namespace sifid {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr std::string_view kMagic = "sifid-cache/1 ";

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

std::string temp_suffix() {
  static std::atomic<unsigned long> counter{0};
  std::ostringstream os;
  os << ".tmp." << ::getpid() << '.' << std::hash<std::thread::id>{}(std::this_thread::get_id())
     << '.' << counter.fetch_add(1);
  return os.str();
}

}  // namespace

std::string_view namespace_name(CacheNamespace ns) {
  switch (ns) {
    case CacheNamespace::kNli: return "nli";
    case CacheNamespace::kEmbed: return "embed";
    case CacheNamespace::kJudge: return "judge";
  }
  return "unknown";
}

CacheKey CacheKey::make(CacheNamespace ns, std::string_view canonical_payload) {
  return CacheKey{ns, sha256_hex(canonical_payload)};
}

Cache::Cache(fs::path root) : root_(std::move(root)) {}

fs::path Cache::entry_path(const CacheKey& key) const {
  return root_ / std::string(namespace_name(key.ns)) / key.digest.substr(0, 2) / key.digest;
}

std::optional<std::string> Cache::get(const CacheKey& key) const {
  const fs::path path = entry_path(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    misses_.fetch_add(1);
    return std::nullopt;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string contents = buffer.str();

  auto corrupt = [&](std::string_view why) -> std::optional<std::string> {
    corrupt_.fetch_add(1);
    misses_.fetch_add(1);
    spdlog::warn("cache: corrupt entry {} ({}); treating as miss", path.string(), why);
    return std::nullopt;
  };

  const std::size_t newline = contents.find('\n');
  if (newline == std::string::npos || contents.compare(0, kMagic.size(), kMagic) != 0) {
    return corrupt("bad header");
  }
  json header = json::parse(contents.substr(kMagic.size(), newline - kMagic.size()), nullptr,
                            /*allow_exceptions=*/false);
  if (!header.is_object() || !header.contains("size") || !header.contains("sha256") ||
      !header["size"].is_number_unsigned() || !header["sha256"].is_string()) {
    return corrupt("bad header");
  }
  std::string value = contents.substr(newline + 1);
  if (value.size() != header["size"].get<std::size_t>()) return corrupt("size mismatch");
  if (sha256_hex(value) != header["sha256"].get<std::string>()) {
    return corrupt("checksum mismatch");
  }
  hits_.fetch_add(1);
  return value;
}

bool Cache::put(const CacheKey& key, std::string_view value, std::string_view model) {
  const fs::path path = entry_path(key);
  auto fail = [&](const std::string& why) {
    write_failures_.fetch_add(1);
    spdlog::warn("cache: could not write {} ({}); continuing uncached", path.string(), why);
    return false;
  };

  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) return fail(ec.message());

  json header = {{"namespace", namespace_name(key.ns)},
                 {"digest", key.digest},
                 {"model", std::string(model)},
                 {"created_at", timestamp_utc()},
                 {"size", value.size()},
                 {"sha256", sha256_hex(value)}};
  std::string contents(kMagic);
  contents += header.dump();
  contents += '\n';
  contents += value;

  const std::string tmp = path.string() + temp_suffix();
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
  if (fd < 0) return fail(std::error_code(errno, std::generic_category()).message());
  const bool ok = write_all(fd, contents) && ::fsync(fd) == 0;
  const int saved = errno;
  ::close(fd);
  if (!ok) {
    ::unlink(tmp.c_str());
    return fail(std::error_code(saved, std::generic_category()).message());
  }
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    const int err = errno;
    ::unlink(tmp.c_str());
    return fail(std::error_code(err, std::generic_category()).message());
  }
  writes_.fetch_add(1);
  return true;
}

std::size_t Cache::clear() {
  std::size_t removed = 0;
  for (auto ns : {CacheNamespace::kNli, CacheNamespace::kEmbed, CacheNamespace::kJudge}) {
    const fs::path dir = root_ / std::string(namespace_name(ns));
    std::error_code ec;
    if (!fs::exists(dir, ec)) continue;
    for (const auto& entry : fs::recursive_directory_iterator(dir, ec)) {
      if (entry.is_regular_file(ec)) ++removed;
    }
    fs::remove_all(dir, ec);
    if (ec) {
      throw Error(ErrorCode::kIo, "cache clear: cannot remove " + dir.string() + ": " +
                                      ec.message());
    }
  }
  return removed;
}

CacheStats Cache::stats() const {
  return CacheStats{hits_.load(), misses_.load(), writes_.load(), write_failures_.load(),
                    corrupt_.load()};
}

}  // namespace sifid
