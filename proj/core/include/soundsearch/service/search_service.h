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
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "soundsearch/catalog.h"
#include "soundsearch/embedder.h"
#include "soundsearch/hnsw_index.h"
#include "soundsearch/search.h"
#include "soundsearch/service/config.h"
#include "soundsearch/service/upload_stage.h"
#include "soundsearch/vector_store.h"

namespace soundsearch::service {

// Client-facing failure: HTTP status plus a stable machine-readable code.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int status_;
  std::string code_;
};

// Maps library errors onto the HTTP taxonomy.
ApiError to_api_error(const Error& e);
nlohmann::json error_body(const std::string& code, const std::string& message);

struct Dataset {
  std::string name;
  VectorStore store;
  std::shared_ptr<const HnswIndex> index;  // null: always exact
  Catalog catalog;
  std::filesystem::path media_root;
};

// Store, index (when present) and manifest named by `config`.
Dataset load_dataset(const DatasetConfig& config);

struct QuerySpec {
  std::vector<std::string> texts;
  std::vector<std::string> upload_refs;
  std::vector<std::string> seed_clip_ids;
  std::size_t k = 20;
  std::optional<std::string> cursor;
  bool dedup = false;
  std::string dataset;
};

// Errors: ApiError InvalidRequest (types, k range), EmptyQuery.
QuerySpec parse_query_spec(const nlohmann::json& body, const SearchConfig& search,
                           const std::string& default_dataset);
// Normalized echo: texts trimmed, resolved dataset and k filled in.
nlohmann::json to_json(const QuerySpec& spec);

// Opaque page token: a fingerprint of the query plus the next offset.
std::string encode_cursor(std::uint64_t fingerprint, std::size_t offset);
// Errors: ApiError InvalidCursor, CursorMismatch.
std::size_t decode_cursor(const std::string& cursor, std::uint64_t expected_fingerprint);

struct MediaSource {
  std::filesystem::path path;
  std::string content_type;
  std::size_t size = 0;
};

struct MediaResponse {
  int status = 200;  // 200, or 206 for a satisfiable range
  std::string content_type;
  std::string body;
  std::size_t total_size = 0;
  std::size_t range_begin = 0;  // inclusive, for 206
  std::size_t range_end = 0;  // inclusive, for 206
};

std::unique_ptr<EmbedderClient> make_embedder(const EmbedderConfig& config);

// Transport-independent request handling. All dataset state is read-only
// after construction; only the upload stage mutates, and it locks.
class SearchService {
 public:
  SearchService(ServiceConfig config, std::vector<Dataset> datasets,
                std::shared_ptr<const EmbedderClient> embedder,
                Clock clock = std::chrono::steady_clock::now);

  // Loads every mounted dataset named in the config.
  static std::unique_ptr<SearchService> from_config(const ServiceConfig& config,
                                                    Clock clock = std::chrono::steady_clock::now);

  // POST /api/search.
  nlohmann::json search(const nlohmann::json& body) const;
  // GET /api/similar/{clip_id}; `k`, `cursor`, `dataset`, `dedup` are the
  // raw query-string values.
  nlohmann::json similar(const std::string& clip_id, const std::optional<std::string>& k,
                         const std::optional<std::string>& cursor,
                         const std::optional<std::string>& dataset,
                         const std::optional<std::string>& dedup) const;
  // GET /api/datasets.
  nlohmann::json datasets() const;
  // POST /api/upload. Errors: PayloadTooLarge, EmptyPayload, UnsupportedMedia.
  nlohmann::json upload(std::vector<unsigned char> body, std::string_view content_type);
  // Resolves a clip's local media file. Errors: UnknownClipId (404),
  // MediaUnavailable (502).
  MediaSource locate_media(const std::string& clip_id,
                           const std::optional<std::string>& dataset) const;
  // GET /api/clip/{clip_id}/audio with an optional single-range Range header
  // value. Errors: as locate_media, plus RangeNotSatisfiable (416).
  MediaResponse clip_audio(const std::string& clip_id, const std::optional<std::string>& dataset,
                           const std::optional<std::string>& range) const;

  const ServiceConfig& config() const noexcept { return config_; }
  UploadStage& uploads() noexcept { return *uploads_; }

  // Ranked list for a unit query: the first `depth` entries of the
  // service's global ordering (ANN pool tiers or exact), after exclusion
  // and optional dedup. Exposed for paging checks.
  std::vector<SearchHit> ranked(const Dataset& ds, const Embedding& unit_query, std::size_t depth,
                                bool dedup, const std::string* exclude) const;
  const Dataset& dataset(const std::string& name) const;

 private:
  nlohmann::json run(const QuerySpec& spec, const std::string* exclude) const;
  Embedding resolve(const QuerySpec& spec, const Dataset& ds) const;
  std::uint64_t fingerprint(const QuerySpec& spec, const Dataset& ds,
                            const std::string* exclude) const;
  std::string default_dataset() const;

  ServiceConfig config_;
  std::vector<Dataset> datasets_;
  std::shared_ptr<const EmbedderClient> embedder_;
  std::unique_ptr<UploadStage> uploads_;
};

}  // namespace soundsearch::service
