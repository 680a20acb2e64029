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

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "soundsearch/embedder.h"
#include "soundsearch/error.h"

namespace soundsearch {

RemoteEmbedder::RemoteEmbedder(std::string endpoint, std::size_t dim,
                               std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), dim_(dim), timeout_(timeout) {
  while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  if (endpoint_.empty()) throw Error(ErrorCode::kInvalidArgument, "embedder endpoint is empty");
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "embedder dim must be positive");
}

std::string RemoteEmbedder::describe() const {
  return "remote(" + endpoint_ + ", dim=" + std::to_string(dim_) + ")";
}

Embedding RemoteEmbedder::post(const std::string& path, const std::string& body,
                               const std::string& content_type) const {
  // One client per request keeps concurrent callers independent.
  httplib::Client client(endpoint_);
  const auto secs = timeout_.count() / 1000;
  const auto usecs = (timeout_.count() % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  auto res = client.Post(path, body, content_type);
  if (!res) {
    throw EmbedderUnavailable("embedder at " + endpoint_ +
                              " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    int retry_after = 0;
    if (res->has_header("Retry-After")) {
      try {
        retry_after = std::stoi(res->get_header_value("Retry-After"));
      } catch (const std::exception&) {
        retry_after = 0;
      }
    }
    throw EmbedderUnavailable(
        "embedder at " + endpoint_ + " answered HTTP " + std::to_string(res->status),
        retry_after);
  }

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw EmbedderUnavailable("embedder returned malformed JSON: " + std::string(e.what()));
  }
  if (!j.is_object() || !j.contains("vector") || !j["vector"].is_array()) {
    throw EmbedderUnavailable("embedder response lacks a vector");
  }
  std::vector<double> values;
  values.reserve(j["vector"].size());
  for (const auto& v : j["vector"]) {
    if (!v.is_number()) throw EmbedderUnavailable("embedder vector has non-numeric entries");
    values.push_back(v.get<double>());
  }
  const std::size_t declared = j.value("dim", values.size());
  if (declared != values.size() || values.size() != dim_) {
    throw Error(ErrorCode::kDimMismatch, "embedder returned dim " + std::to_string(values.size()) +
                                             ", expected " + std::to_string(dim_));
  }
  return Embedding(std::move(values));
}

Embedding RemoteEmbedder::text_vector(std::string_view text) const {
  const nlohmann::json body = {{"text", std::string(text)}};
  return post("/embed/text", body.dump(), "application/json");
}

Embedding RemoteEmbedder::audio_vector(std::span<const unsigned char> audio,
                                       std::string_view media_hint) const {
  const std::string body(reinterpret_cast<const char*>(audio.data()), audio.size());
  return post("/embed/audio", body, content_type_for_media(media_hint));
}

}  // namespace soundsearch
