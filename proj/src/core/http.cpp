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

#include "http.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace sifid {

bool is_retryable_status(int status) {
  return status == 408 || status == 429 || (status >= 500 && status <= 599);
}

JsonEndpoint::JsonEndpoint(EndpointConfig config, ErrorCode status_error)
    : config_(std::move(config)), status_error_(status_error) {
  const std::string& url = config_.base_url;
  const auto scheme_end = url.find("://");
  if (url.empty() || scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfig, "invalid endpoint URL '" + url + "'");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kConfig, "unsupported URL scheme '" + scheme + "'");
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  if (path_begin == scheme_end + 3 || scheme_end + 3 == url.size()) {
    throw Error(ErrorCode::kConfig, "endpoint URL '" + url + "' has no host");
  }
  origin_ = url.substr(0, path_begin);
  if (path_begin != std::string::npos) prefix_ = url.substr(path_begin);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (config_.retry.retry_budget < 0) {
    throw Error(ErrorCode::kConfig, "retry budget must be non-negative");
  }
}

HttpReply JsonEndpoint::post(std::string_view path, const std::string& body) const {
  const std::string target = prefix_ + std::string(path);
  httplib::Headers headers;
  if (!config_.bearer_token.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.bearer_token);
  }

  std::string last_failure;
  int last_status = 0;
  std::string last_body;
  for (int attempt = 0; attempt <= config_.retry.retry_budget; ++attempt) {
    if (attempt > 0) {
      retries_.fetch_add(1);
      auto delay = config_.retry.base_backoff * (1LL << std::min(attempt - 1, 20));
      delay = std::min<std::chrono::milliseconds>(delay, config_.retry.max_backoff);
      spdlog::debug("{}{}: retry {} after {} ms ({})", origin_, target, attempt, delay.count(),
                    last_failure);
      std::this_thread::sleep_for(delay);
    }
    requests_.fetch_add(1);

    httplib::Client client(origin_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    auto res = client.Post(target, headers, body, "application/json");
    if (!res) {
      last_failure = "connection failed: " + httplib::to_string(res.error());
      last_status = 0;
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      return HttpReply{res->status, std::move(res->body), attempt};
    }
    last_status = res->status;
    last_body = res->body;
    last_failure = "status " + std::to_string(res->status);
    if (!is_retryable_status(res->status)) {
      Error err(status_error_, origin_ + target + " returned status " +
                                   std::to_string(res->status));
      err.with_status(res->status).with_body(res->body);
      throw err;
    }
  }
  Error err(ErrorCode::kTransport, origin_ + target + ": giving up after " +
                                       std::to_string(config_.retry.retry_budget) +
                                       " retries (" + last_failure + ")");
  if (last_status != 0) err.with_status(last_status).with_body(last_body);
  throw err;
}

}  // namespace sifid
