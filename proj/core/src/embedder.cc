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

#include "soundsearch/embedder.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <sstream>

#include "soundsearch/error.h"
#include "soundsearch/mock_rng.h"

namespace soundsearch {

namespace {

struct MediaType {
  std::string_view hint;
  std::string_view content_type;
};

constexpr std::array<MediaType, 4> kMedia = {{
    {"wav", "audio/wav"},
    {"flac", "audio/flac"},
    {"mp3", "audio/mpeg"},
    {"ogg", "audio/ogg"},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool starts_with(std::span<const unsigned char> bytes, std::string_view magic,
                 std::size_t offset = 0) {
  return bytes.size() >= offset + magic.size() &&
         std::memcmp(bytes.data() + offset, magic.data(), magic.size()) == 0;
}

// Cheap container sniffing so obviously mislabeled uploads are refused before
// reaching the encoder.
bool container_matches(std::span<const unsigned char> bytes, std::string_view hint) {
  if (hint == "wav") return starts_with(bytes, "RIFF") && starts_with(bytes, "WAVE", 8);
  if (hint == "flac") return starts_with(bytes, "fLaC");
  if (hint == "ogg") return starts_with(bytes, "OggS");
  if (hint == "mp3") {
    return starts_with(bytes, "ID3") ||
           (bytes.size() >= 2 && bytes[0] == 0xFF && (bytes[1] & 0xE0) == 0xE0);
  }
  return false;
}

Embedding checked_unit(const EmbedderClient& client, Embedding e) {
  if (e.dim() != client.dim()) {
    throw Error(ErrorCode::kDimMismatch, "embedder returned dim " + std::to_string(e.dim()) +
                                             ", expected " + std::to_string(client.dim()));
  }
  return normalize(e);
}

}  // namespace

MockEmbedder::MockEmbedder(std::size_t dim, std::uint64_t key) : dim_(dim), key_(key) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "embedder dim must be positive");
}

std::string MockEmbedder::describe() const {
  std::ostringstream s;
  s << "mock(dim=" << dim_ << ", key=0x" << std::hex << key_ << ")";
  return s.str();
}

Embedding MockEmbedder::text_vector(std::string_view text) const {
  return Embedding(seeded_unit_vector(keyed_hash(key_, "text", text), dim_));
}

Embedding MockEmbedder::audio_vector(std::span<const unsigned char> audio,
                                     std::string_view /*media_hint*/) const {
  return Embedding(seeded_unit_vector(keyed_hash(key_, "audio", audio), dim_));
}

std::string trim_query_text(std::string_view text) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

Embedding embed_text(const EmbedderClient& client, std::string_view text) {
  const std::string trimmed = trim_query_text(text);
  if (trimmed.empty()) throw Error(ErrorCode::kEmptyQueryText, "query text is empty");
  return checked_unit(client, client.text_vector(trimmed));
}

Embedding embed_audio(const EmbedderClient& client, std::span<const unsigned char> audio,
                      std::string_view media_hint) {
  if (audio.empty()) throw Error(ErrorCode::kEmptyPayload, "audio payload is empty");
  const std::string hint = lower(media_hint);
  if (!is_supported_media(hint)) {
    throw Error(ErrorCode::kUnsupportedMedia, "unsupported media type: " + std::string(media_hint));
  }
  if (!container_matches(audio, hint)) {
    throw Error(ErrorCode::kUnsupportedMedia, "payload is not a valid " + hint + " container");
  }
  return checked_unit(client, client.audio_vector(audio, hint));
}

bool is_supported_media(std::string_view media_hint) {
  const std::string h = lower(media_hint);
  return std::any_of(kMedia.begin(), kMedia.end(), [&](const MediaType& m) { return m.hint == h; });
}

std::string content_type_for_media(std::string_view media_hint) {
  const std::string h = lower(media_hint);
  for (const MediaType& m : kMedia) {
    if (m.hint == h) return std::string(m.content_type);
  }
  return "application/octet-stream";
}

std::optional<std::string> media_from_content_type(std::string_view content_type) {
  std::string ct = lower(content_type);
  if (auto semi = ct.find(';'); semi != std::string::npos) ct.resize(semi);
  ct = trim_query_text(ct);
  for (const MediaType& m : kMedia) {
    if (m.content_type == ct) return std::string(m.hint);
  }
  if (ct == "audio/x-wav" || ct == "audio/wave" || ct == "audio/vnd.wave") return "wav";
  if (ct == "audio/mp3") return "mp3";
  if (ct == "audio/x-flac") return "flac";
  return std::nullopt;
}

std::optional<std::string> media_from_path(std::string_view path) {
  const auto dot = path.rfind('.');
  if (dot == std::string_view::npos) return std::nullopt;
  const std::string ext = lower(path.substr(dot + 1));
  if (is_supported_media(ext)) return ext;
  return std::nullopt;
}

std::optional<std::string> sniff_media(std::span<const unsigned char> bytes) {
  for (const MediaType& m : kMedia) {
    if (container_matches(bytes, m.hint)) return std::string(m.hint);
  }
  return std::nullopt;
}

bool media_matches(std::span<const unsigned char> bytes, std::string_view media_hint) {
  return container_matches(bytes, lower(media_hint));
}

}  // namespace soundsearch
