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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sifid {

// Values are shared with the C API status codes.
enum class ErrorCode : int {
  kOk = 0,
  kConfig = 1,
  kTransport = 2,
  kProtocol = 3,
  kDataset = 4,
  kScoring = 5,
  kEmptyFilter = 6,
  kRender = 7,
  kUndefinedMetric = 8,
  kJudge = 9,
  kIo = 10,
  kInvalidInput = 11,
  kRunFailed = 12,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Raw response body for protocol and judge errors.
  const std::string& body() const noexcept { return body_; }
  Error& with_body(std::string body) {
    body_ = std::move(body);
    return *this;
  }

  std::optional<int> status() const noexcept { return status_; }
  Error& with_status(int status) {
    status_ = status;
    return *this;
  }

  // Offending sentence index for scoring errors.
  std::optional<std::size_t> sentence_index() const noexcept { return index_; }
  Error& with_sentence_index(std::size_t index) {
    index_ = index;
    return *this;
  }

 private:
  ErrorCode code_;
  std::string body_;
  std::optional<int> status_;
  std::optional<std::size_t> index_;
};

}  // namespace sifid
