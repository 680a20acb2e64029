// Copyright 2026 The SoundSearch Authors
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace soundsearch {

// Stable error codes. The names returned by code_name() are part of the
// HTTP and CLI contracts and must not change.
enum class ErrorCode {
  kZeroVector,
  kDimMismatch,
  kEmptyQuery,
  kBatchMismatch,
  kNonPositiveTemperature,
  kNonFinite,

  kDuplicateId,
  kEmptyStore,
  kIndexNotBuilt,
  kUnknownClipId,
  kCorruptHeader,
  kVersionMismatch,
  kTruncatedFile,
  kChecksumMismatch,
  kIndexStoreMismatch,
  kIoError,

  kMissingEmbedding,
  kMalformedRecord,
  kEmptyQueryText,
  kEmptyPayload,
  kUnsupportedMedia,
  kEmbedderUnavailable,

  kTooFewPairs,
  kAllZeroDifferences,
  kMissingDimension,
  kInvalidArgument,
  kMalformedCsv,
};

std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const { return code_name(code_); }

 private:
  ErrorCode code_;
};

// Raised by remote embedders; carries the server's Retry-After hint when one
// was provided (0 otherwise).
class EmbedderUnavailable : public Error {
 public:
  EmbedderUnavailable(const std::string& message, int retry_after_s = 0)
      : Error(ErrorCode::kEmbedderUnavailable, message),
        retry_after_s_(retry_after_s) {}

  int retry_after_s() const noexcept { return retry_after_s_; }

 private:
  int retry_after_s_;
};

}  // namespace soundsearch
