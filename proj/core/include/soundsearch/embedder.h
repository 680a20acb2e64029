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
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "soundsearch/embedding.h"

namespace soundsearch {

// Turns query text and audio into vectors in the shared space. The encoders
// themselves live elsewhere (a remote service, or the deterministic mock).
// Implementations must be safe to call concurrently.
class EmbedderClient {
 public:
  virtual ~EmbedderClient() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string describe() const = 0;

  // Raw hooks; callers should go through embed_text()/embed_audio(), which
  // validate input and normalize the output.
  virtual Embedding text_vector(std::string_view text) const = 0;
  virtual Embedding audio_vector(std::span<const unsigned char> audio,
                                 std::string_view media_hint) const = 0;
};

inline constexpr std::uint64_t kDefaultMockKey = 0x5eedc1a95a11d5ull;

// Keyed-hash seeded Gaussian vectors; see mock_rng.h for the exact recipe.
// Text is hashed under tag "text", audio bytes under tag "audio".
class MockEmbedder final : public EmbedderClient {
 public:
  explicit MockEmbedder(std::size_t dim, std::uint64_t key = kDefaultMockKey);

  std::size_t dim() const override { return dim_; }
  std::string describe() const override;
  Embedding text_vector(std::string_view text) const override;
  Embedding audio_vector(std::span<const unsigned char> audio,
                         std::string_view media_hint) const override;

 private:
  std::size_t dim_;
  std::uint64_t key_;
};

// Proxies an HTTP embedding service:
//   POST {endpoint}/embed/text   {"text": "..."}
//   POST {endpoint}/embed/audio  raw bytes, Content-Type audio/<media>
// both answering {"dim": D, "vector": [...]}. Any transport failure or non-200
// status surfaces as EmbedderUnavailable.
class RemoteEmbedder final : public EmbedderClient {
 public:
  RemoteEmbedder(std::string endpoint, std::size_t dim,
                 std::chrono::milliseconds timeout = std::chrono::seconds(10));

  std::size_t dim() const override { return dim_; }
  std::string describe() const override;
  Embedding text_vector(std::string_view text) const override;
  Embedding audio_vector(std::span<const unsigned char> audio,
                         std::string_view media_hint) const override;

 private:
  Embedding post(const std::string& path, const std::string& body,
                 const std::string& content_type) const;

  std::string endpoint_;
  std::size_t dim_;
  std::chrono::milliseconds timeout_;
};

// Trims surrounding whitespace only; case and wording are left to the encoder.
std::string trim_query_text(std::string_view text);

// Errors: EmptyQueryText, DimMismatch, EmbedderUnavailable.
Embedding embed_text(const EmbedderClient& client, std::string_view text);

// Errors: EmptyPayload, UnsupportedMedia, DimMismatch, EmbedderUnavailable.
Embedding embed_audio(const EmbedderClient& client, std::span<const unsigned char> audio,
                      std::string_view media_hint);

// Media containers accepted for upload, keyed by short hint ("wav", "flac",
// "mp3", "ogg").
bool is_supported_media(std::string_view media_hint);
std::string content_type_for_media(std::string_view media_hint);
// Accepts "audio/wav", "audio/x-wav", "audio/mpeg", ...; nullopt if unknown.
std::optional<std::string> media_from_content_type(std::string_view content_type);
// From a filename extension; nullopt if unknown.
std::optional<std::string> media_from_path(std::string_view path);
// Container type from the leading magic bytes, when recognized.
std::optional<std::string> sniff_media(std::span<const unsigned char> bytes);
// True when the bytes carry the container signature for `media_hint`.
bool media_matches(std::span<const unsigned char> bytes, std::string_view media_hint);

}  // namespace soundsearch
