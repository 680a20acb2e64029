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

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace soundsearch::service {

using Clock = std::function<std::chrono::steady_clock::time_point()>;

struct StagedUpload {
  std::shared_ptr<const std::vector<unsigned char>> bytes;
  std::string media;  // "wav", "flac", ...
};

// In-memory staging area for uploaded query audio. Tokens expire `ttl` after
// insertion; expired tokens are remembered for a while so lookups can tell
// "expired" from "never issued". Thread-safe.
class UploadStage {
 public:
  enum class Status { kFound, kExpired, kUnknown };

  explicit UploadStage(std::chrono::milliseconds ttl, Clock clock = std::chrono::steady_clock::now);

  std::string put(std::vector<unsigned char> bytes, std::string media);
  Status get(const std::string& token, StagedUpload* out);

  // Drops expired payloads; called opportunistically by put().
  void purge();
  std::size_t live_count() const;

 private:
  struct Entry {
    StagedUpload upload;
    std::chrono::steady_clock::time_point expires;
  };
  void purge_locked(std::chrono::steady_clock::time_point now);
  std::string new_token();

  std::chrono::milliseconds ttl_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, Entry> live_;
  std::unordered_map<std::string, std::chrono::steady_clock::time_point> expired_;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_ = 0;
};

}  // namespace soundsearch::service
