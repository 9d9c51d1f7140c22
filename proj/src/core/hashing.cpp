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

#include "hashing.hpp"

#include <openssl/evp.h>

#include <array>
#include <memory>

#include "error.hpp"

namespace sifid {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kConfig: return "configuration error";
    case ErrorCode::kTransport: return "transport error";
    case ErrorCode::kProtocol: return "protocol error";
    case ErrorCode::kDataset: return "dataset error";
    case ErrorCode::kScoring: return "scoring error";
    case ErrorCode::kEmptyFilter: return "empty filter";
    case ErrorCode::kRender: return "render error";
    case ErrorCode::kUndefinedMetric: return "undefined metric";
    case ErrorCode::kJudge: return "judge error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kInvalidInput: return "invalid input";
    case ErrorCode::kRunFailed: return "run failed";
  }
  return "unknown error";
}

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw Error(ErrorCode::kIo, "sha256: digest computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

}  // namespace sifid
