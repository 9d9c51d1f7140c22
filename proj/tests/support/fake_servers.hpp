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
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "scorer.hpp"

namespace httplib {
class Server;
}

namespace sifid::testing {

// Deterministic stand-ins for a real NLI model and embedding model.
NliProbs fake_nli(const std::string& premise, const std::string& hypothesis);
std::vector<double> fake_embedding(const std::string& text);

struct CannedReply {
  int status = 200;
  std::string body;
};

// Speaks the scorer wire contract on 127.0.0.1 at a free port.
class FakeScorerServer {
 public:
  FakeScorerServer();
  ~FakeScorerServer();

  std::string url() const;
  std::size_t nli_requests() const { return nli_requests_.load(); }
  std::size_t embed_requests() const { return embed_requests_.load(); }
  std::size_t pairs_scored() const { return pairs_scored_.load(); }
  std::size_t largest_batch() const { return largest_batch_.load(); }
  std::string last_authorization() const;

  // Replies served before normal behaviour resumes, one per request.
  void queue(CannedReply reply);
  // Every NLI result becomes (1/3, 1/3, 1/3).
  void set_uniform(bool uniform) { uniform_ = uniform; }
  // Every embedding becomes the zero vector for inputs containing `marker`.
  void set_zero_marker(std::string marker);

 private:
  std::optional<CannedReply> next_canned();

  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<std::size_t> nli_requests_{0};
  std::atomic<std::size_t> embed_requests_{0};
  std::atomic<std::size_t> pairs_scored_{0};
  std::atomic<std::size_t> largest_batch_{0};
  std::atomic<bool> uniform_{false};
  mutable std::mutex mutex_;
  std::deque<CannedReply> canned_;
  std::string zero_marker_;
  std::string last_authorization_;
};

// Chat-completions endpoint. Queued replies are served first; afterwards
// every request gets a completion from `responder(prompt)` with a usage
// block counting whitespace tokens.
class FakeJudgeServer {
 public:
  explicit FakeJudgeServer(std::function<std::string(const std::string&)> responder);
  ~FakeJudgeServer();

  std::string url() const;  // includes the /v1 prefix
  std::size_t requests() const { return requests_.load(); }
  void queue(CannedReply reply);
  std::vector<std::string> request_bodies() const;
  std::string last_authorization() const;

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::function<std::string(const std::string&)> responder_;
  std::atomic<std::size_t> requests_{0};
  mutable std::mutex mutex_;
  std::deque<CannedReply> canned_;
  std::vector<std::string> bodies_;
  std::string last_authorization_;
};

// A port on 127.0.0.1 with nothing listening.
int unused_port();

}  // namespace sifid::testing
