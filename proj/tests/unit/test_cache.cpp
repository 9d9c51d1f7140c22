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

#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>
#include <thread>

#include "cache.hpp"
#include "hashing.hpp"
#include "helpers.hpp"

using namespace sifid;
using namespace sifid::testing;
namespace fs = std::filesystem;

namespace {

// Routes the default logger into a string for the lifetime of the object.
class LogCapture {
 public:
  LogCapture() : previous_(spdlog::default_logger()) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(stream_);
    spdlog::set_default_logger(std::make_shared<spdlog::logger>("capture", sink));
  }
  ~LogCapture() { spdlog::set_default_logger(previous_); }
  std::string text() const { return stream_.str(); }

 private:
  std::ostringstream stream_;
  std::shared_ptr<spdlog::logger> previous_;
};

std::size_t count_entries(const fs::path& root) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(root)) n += e.is_regular_file();
  return n;
}

}  // namespace

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("cache keys and layout") {
  TempDir dir;
  Cache cache(dir.path());
  const auto key = CacheKey::make(CacheNamespace::kJudge, "payload");
  CHECK(key.digest == sha256_hex("payload"));
  CHECK(cache.entry_path(key) == dir.path() / "judge" / key.digest.substr(0, 2) / key.digest);
  CHECK(CacheKey::make(CacheNamespace::kNli, "p") != CacheKey::make(CacheNamespace::kEmbed, "p"));
  CHECK(namespace_name(CacheNamespace::kNli) == "nli");
  CHECK(namespace_name(CacheNamespace::kEmbed) == "embed");
}

TEST_CASE("cache round trip and header") {
  TempDir dir;
  Cache cache(dir.path());
  const auto key = CacheKey::make(CacheNamespace::kNli, "k");
  CHECK_FALSE(cache.get(key).has_value());
  const std::string value = "line one\nline two\0tail";
  CHECK(cache.put(key, value, "model-x"));
  CHECK(cache.get(key) == std::optional<std::string>(value));
  const std::string raw = read_file(cache.entry_path(key));
  const auto newline = raw.find('\n');
  REQUIRE(raw.rfind("sifid-cache/1 ", 0) == 0);
  const auto header = nlohmann::json::parse(raw.substr(14, newline - 14));
  CHECK(header.at("namespace") == "nli");
  CHECK(header.at("digest") == key.digest);
  CHECK(header.at("model") == "model-x");
  CHECK(header.at("size") == value.size());
  CHECK(header.at("sha256") == sha256_hex(value));
  CHECK(header.contains("created_at"));
  CHECK(raw.substr(newline + 1) == value);
  const auto stats = cache.stats();
  CHECK(stats.hits == 1);
  CHECK(stats.misses == 1);
  CHECK(stats.writes == 1);
}

TEST_CASE("truncated entry is a logged miss") {
  TempDir dir;
  Cache cache(dir.path());
  const auto key = CacheKey::make(CacheNamespace::kJudge, "k");
  REQUIRE(cache.put(key, std::string(100, 'v')));
  const auto path = cache.entry_path(key);
  fs::resize_file(path, fs::file_size(path) - 10);
  LogCapture log;
  CHECK_FALSE(cache.get(key).has_value());
  CHECK(log.text().find("corrupt entry") != std::string::npos);
  CHECK(cache.stats().corrupt == 1);
}

TEST_CASE("flipped byte is a logged miss") {
  TempDir dir;
  Cache cache(dir.path());
  const auto key = CacheKey::make(CacheNamespace::kJudge, "k");
  REQUIRE(cache.put(key, "value"));
  auto raw = read_file(cache.entry_path(key));
  raw.back() = 'X';
  write_file(cache.entry_path(key), raw);
  LogCapture log;
  CHECK_FALSE(cache.get(key).has_value());
  CHECK(log.text().find("checksum") != std::string::npos);
}

TEST_CASE("unwritable cache directory") {
  TempDir dir;
  write_file(dir.path() / "blocker", "not a directory");
  Cache cache(dir.path() / "blocker" / "cache");
  const auto key = CacheKey::make(CacheNamespace::kJudge, "k");
  LogCapture log;
  CHECK_FALSE(cache.put(key, "v"));
  CHECK(log.text().find("could not write") != std::string::npos);
  CHECK_FALSE(cache.get(key).has_value());
  CHECK(cache.stats().write_failures == 1);
}

TEST_CASE("concurrent identical puts commit one entry") {
  TempDir dir;
  Cache cache(dir.path());
  const auto key = CacheKey::make(CacheNamespace::kEmbed, "same");
  std::vector<int> ok(8, 0);
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&, t] {
        for (int k = 0; k < 20; ++k) ok[t] += cache.put(key, "same value");
      });
    }
  }
  for (int v : ok) CHECK(v == 20);
  CHECK(count_entries(dir.path()) == 1);
  CHECK(cache.get(key) == std::optional<std::string>("same value"));
}

TEST_CASE("entries survive a process restart") {
  TempDir dir;
  const auto key = CacheKey::make(CacheNamespace::kJudge, "durable");
  const pid_t child = fork();
  REQUIRE(child >= 0);
  if (child == 0) {
    Cache writer(dir.path());
    _exit(writer.put(key, "persisted") ? 0 : 1);
  }
  int status = 0;
  waitpid(child, &status, 0);
  REQUIRE(WIFEXITED(status));
  REQUIRE(WEXITSTATUS(status) == 0);
  Cache reader(dir.path());
  CHECK(reader.get(key) == std::optional<std::string>("persisted"));
}

TEST_CASE("clear removes every entry") {
  TempDir dir;
  Cache cache(dir.path());
  for (int k = 0; k < 5; ++k) {
    cache.put(CacheKey::make(CacheNamespace::kJudge, std::to_string(k)), "v");
  }
  cache.put(CacheKey::make(CacheNamespace::kNli, "n"), "v");
  CHECK(cache.clear() == 6);
  CHECK(count_entries(dir.path()) == 0);
  CHECK_FALSE(cache.get(CacheKey::make(CacheNamespace::kNli, "n")).has_value());
  Cache missing(dir.path() / "never-created");
  CHECK(missing.clear() == 0);
}
