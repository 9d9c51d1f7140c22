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
#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>

#include "error.hpp"

namespace sifid {

struct RetryPolicy {
  int retry_budget = 3;
  std::chrono::milliseconds base_backoff{500};
  std::chrono::milliseconds max_backoff{8000};
};

struct EndpointConfig {
  std::string base_url;  // scheme://host[:port][/prefix]
  std::string bearer_token;
  std::chrono::seconds timeout{60};
  RetryPolicy retry;
};

struct HttpReply {
  int status = 0;
  std::string body;
  int retries = 0;
};

// POSTs JSON bodies to one base URL. Connection failures and retryable
// statuses (408, 429, 5xx) are retried with exponential backoff. Safe for
// concurrent use; every request opens its own connection.
class JsonEndpoint {
 public:
  // `status_error` is the code raised for a non-retryable non-2xx status.
  explicit JsonEndpoint(EndpointConfig config, ErrorCode status_error = ErrorCode::kProtocol);

  // Throws Error(kTransport) once the retry budget is spent, or
  // Error(status_error) carrying status and body for other failures.
  HttpReply post(std::string_view path, const std::string& body) const;

  const EndpointConfig& config() const { return config_; }
  std::size_t requests() const { return requests_.load(); }
  std::size_t retries() const { return retries_.load(); }

 private:
  EndpointConfig config_;
  ErrorCode status_error_;
  std::string origin_;  // scheme://host[:port]
  std::string prefix_;  // path prefix without trailing slash
  mutable std::atomic<std::size_t> requests_{0};
  mutable std::atomic<std::size_t> retries_{0};
};

bool is_retryable_status(int status);

}  // namespace sifid
