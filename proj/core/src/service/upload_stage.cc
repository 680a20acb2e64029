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

#include "soundsearch/service/upload_stage.h"

#include <cstdio>
#include <random>

#include "soundsearch/mock_rng.h"

namespace soundsearch::service {

namespace {

// Expired tokens are forgotten after this many TTLs.
constexpr int kTombstoneTtls = 24;

}  // namespace

UploadStage::UploadStage(std::chrono::milliseconds ttl, Clock clock)
    : ttl_(ttl), clock_(std::move(clock)) {
  std::random_device rd;
  salt_ = (std::uint64_t{rd()} << 32) ^ rd();
}

std::string UploadStage::new_token() {
  SplitMix64 a(salt_ ^ ++counter_);
  SplitMix64 b(a.next() ^ 0x9e3779b97f4a7c15ull);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "up_%016llx%016llx", static_cast<unsigned long long>(a.next()),
                static_cast<unsigned long long>(b.next()));
  return buf;
}

std::string UploadStage::put(std::vector<unsigned char> bytes, std::string media) {
  const auto now = clock_();
  std::lock_guard lock(mutex_);
  purge_locked(now);
  std::string token;
  do {
    token = new_token();
  } while (live_.contains(token) || expired_.contains(token));
  Entry e{{std::make_shared<const std::vector<unsigned char>>(std::move(bytes)), std::move(media)},
          now + ttl_};
  live_.emplace(token, std::move(e));
  return token;
}

UploadStage::Status UploadStage::get(const std::string& token, StagedUpload* out) {
  const auto now = clock_();
  std::lock_guard lock(mutex_);
  if (auto it = live_.find(token); it != live_.end()) {
    if (now < it->second.expires) {
      if (out) *out = it->second.upload;
      return Status::kFound;
    }
    expired_.emplace(token, it->second.expires);
    live_.erase(it);
    return Status::kExpired;
  }
  return expired_.contains(token) ? Status::kExpired : Status::kUnknown;
}

void UploadStage::purge() {
  const auto now = clock_();
  std::lock_guard lock(mutex_);
  purge_locked(now);
}

void UploadStage::purge_locked(std::chrono::steady_clock::time_point now) {
  for (auto it = live_.begin(); it != live_.end();) {
    if (now >= it->second.expires) {
      expired_.emplace(it->first, it->second.expires);
      it = live_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto it = expired_.begin(); it != expired_.end();) {
    if (now >= it->second + ttl_ * kTombstoneTtls) {
      it = expired_.erase(it);
    } else {
      ++it;
    }
  }
}

std::size_t UploadStage::live_count() const {
  std::lock_guard lock(mutex_);
  return live_.size();
}

}  // namespace soundsearch::service
