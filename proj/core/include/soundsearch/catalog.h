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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soundsearch/embedder.h"
#include "soundsearch/error.h"
#include "soundsearch/vector_store.h"

namespace soundsearch {

struct AudioClip {
  std::string clip_id;
  std::string media_uri;
  std::optional<double> duration_s;
  std::vector<std::string> labels;
  std::optional<std::string> caption;

  friend bool operator==(const AudioClip&, const AudioClip&) = default;
};

// Errors: MalformedRecord.
AudioClip clip_from_json(const nlohmann::json& j);
nlohmann::json clip_to_json(const AudioClip& clip);

class Catalog {
 public:
  // Errors: DuplicateId, MalformedRecord (empty id, non-positive duration).
  void add(AudioClip clip);

  const AudioClip* find(std::string_view clip_id) const;
  std::size_t size() const noexcept { return clips_.size(); }
  const std::vector<AudioClip>& clips() const noexcept { return clips_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::vector<AudioClip> clips_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> by_id_;
};

// One skipped manifest line.
struct IngestIssue {
  std::size_t line = 0;  // 1-based
  std::string clip_id;  // empty when the record could not be parsed
  ErrorCode code = ErrorCode::kMalformedRecord;
  std::string message;
};

struct IngestReport {
  std::size_t records_read = 0;
  std::size_t ingested = 0;
  std::vector<IngestIssue> skipped;
};

// Supplies one corpus vector per clip. Returning nullopt reports
// MissingEmbedding for that clip.
class EmbeddingSource {
 public:
  virtual ~EmbeddingSource() = default;
  virtual std::size_t dim() const = 0;
  virtual std::optional<std::vector<double>> lookup(const AudioClip& clip) = 0;
};

// Vectors from a precomputed store file, matched by clip id.
class StoreEmbeddingSource final : public EmbeddingSource {
 public:
  explicit StoreEmbeddingSource(VectorStore store) : store_(std::move(store)) {}
  std::size_t dim() const override { return store_.dim(); }
  std::optional<std::vector<double>> lookup(const AudioClip& clip) override;

 private:
  VectorStore store_;
};

// Reads each clip's media file (resolved against `media_root`) and embeds it.
class EmbedderEmbeddingSource final : public EmbeddingSource {
 public:
  EmbedderEmbeddingSource(const EmbedderClient& client, std::filesystem::path media_root)
      : client_(client), media_root_(std::move(media_root)) {}
  std::size_t dim() const override { return client_.dim(); }
  std::optional<std::vector<double>> lookup(const AudioClip& clip) override;

 private:
  const EmbedderClient& client_;
  std::filesystem::path media_root_;
};

// Seeded unit vectors keyed by clip id (tag "synthetic", key = seed); the
// benchmark corpus generator.
class SyntheticEmbeddingSource final : public EmbeddingSource {
 public:
  SyntheticEmbeddingSource(std::uint64_t seed, std::size_t dim) : seed_(seed), dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  std::optional<std::vector<double>> lookup(const AudioClip& clip) override;

 private:
  std::uint64_t seed_;
  std::size_t dim_;
};

std::vector<double> synthetic_vector(std::uint64_t seed, std::size_t dim, std::string_view clip_id);

struct IngestResult {
  Catalog catalog;
  VectorStore store;
  IngestReport report;
};

// Reads a JSON-lines manifest, pulls one vector per clip from `source`, and
// writes the store to `store_path`. Bad records are skipped and reported;
// the returned catalog and store hold exactly the same id set.
IngestResult ingest_manifest(const std::filesystem::path& manifest_path, EmbeddingSource& source,
                             const std::filesystem::path& store_path);

// Writes a JSON-lines manifest, one clip per line, in catalog order.
void write_manifest(const Catalog& catalog, const std::filesystem::path& path);

// Loads a manifest without vectors (service sidecar). Malformed lines are
// skipped into `report` when given, otherwise they throw.
Catalog read_manifest(const std::filesystem::path& path, IngestReport* report = nullptr);

// AudioSet-shaped synthetic manifest: `count` ten-second clips with ids
// "syn0000000"..., one of 527 class labels each.
void write_synthetic_manifest(const std::filesystem::path& path, std::size_t count,
                              std::uint64_t seed);
std::string synthetic_clip_id(std::size_t i);

// Local filesystem path for a media locator: "file://" URIs and plain paths
// (relative ones resolved against `root`). nullopt for other schemes.
std::optional<std::filesystem::path> resolve_media_path(std::string_view media_uri,
                                                        const std::filesystem::path& root);

}  // namespace soundsearch
