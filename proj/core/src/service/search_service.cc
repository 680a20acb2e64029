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

#include "soundsearch/service/search_service.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "soundsearch/error.h"
#include "soundsearch/mock_rng.h"
#include "soundsearch/query.h"

namespace soundsearch::service {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& message) {
  throw ApiError(400, "InvalidRequest", message);
}

std::vector<std::string> string_list(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return {};
  if (!it->is_array()) invalid(std::string(key) + " must be an array of strings");
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const json& v : *it) {
    if (!v.is_string()) invalid(std::string(key) + " must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::size_t parse_k_value(const json& v, std::size_t max_k) {
  if (!v.is_number_integer()) invalid("k must be an integer in [1, " + std::to_string(max_k) + "]");
  const auto k = v.get<long long>();
  if (k < 1 || static_cast<unsigned long long>(k) > max_k) {
    invalid("k must be in [1, " + std::to_string(max_k) + "], got " + std::to_string(k));
  }
  return static_cast<std::size_t>(k);
}

bool parse_bool_text(const std::string& s) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  invalid("expected true or false, got '" + s + "'");
}

// Strict (score desc, clip id asc) order shared with TopKCollector.
bool ranks_before(const SearchHit& a, const SearchHit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.clip_id < b.clip_id;
}

json hit_json(const SearchHit& h, const Dataset& ds) {
  json j = {{"rank", h.rank}, {"clip_id", h.clip_id}, {"score", h.score}};
  if (const AudioClip* clip = ds.catalog.find(h.clip_id)) {
    j["labels"] = clip->labels;
    if (clip->duration_s) j["duration_s"] = *clip->duration_s;
    if (clip->caption) j["caption"] = *clip->caption;
    j["audio_url"] = "/api/clip/" + h.clip_id + "/audio?dataset=" + ds.name;
  }
  return j;
}

struct ByteRange {
  std::size_t begin;
  std::size_t end;  // inclusive
};

// Single "bytes=" range; nullopt means serve the whole entity.
std::optional<ByteRange> parse_range(const std::string& header, std::size_t size) {
  constexpr std::string_view kPrefix = "bytes=";
  if (header.rfind(kPrefix, 0) != 0) return std::nullopt;
  const std::string spec = header.substr(kPrefix.size());
  if (spec.find(',') != std::string::npos) return std::nullopt;  // multi-range: send it all
  const auto dash = spec.find('-');
  if (dash == std::string::npos) return std::nullopt;
  auto number = [](std::string_view s, std::size_t* out) {
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
    return ec == std::errc() && p == s.data() + s.size();
  };
  const std::string_view first(spec.data(), dash);
  const std::string_view last(spec.data() + dash + 1, spec.size() - dash - 1);
  std::size_t a = 0, b = 0;
  const bool has_a = number(first, &a);
  const bool has_b = number(last, &b);
  if ((!has_a && !first.empty()) || (!has_b && !last.empty()) || (!has_a && !has_b)) {
    return std::nullopt;
  }
  auto unsatisfiable = [&] {
    return ApiError(416, "RangeNotSatisfiable",
                    "range '" + header + "' outside entity of " + std::to_string(size) + " bytes");
  };
  if (!has_a) {  // suffix: last b bytes
    if (b == 0 || size == 0) throw unsatisfiable();
    b = std::min(b, size);
    return ByteRange{size - b, size - 1};
  }
  if (a >= size) throw unsatisfiable();
  if (!has_b || b >= size) b = size - 1;
  if (b < a) throw unsatisfiable();
  return ByteRange{a, b};
}

}  // namespace

ApiError to_api_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kEmptyQuery:
    case ErrorCode::kEmptyQueryText:
      return ApiError(400, "EmptyQuery", e.what());
    case ErrorCode::kInvalidArgument:
      return ApiError(400, "InvalidRequest", e.what());
    case ErrorCode::kZeroVector:
      return ApiError(400, "ZeroVector", e.what());
    case ErrorCode::kEmptyPayload:
      return ApiError(400, "EmptyPayload", e.what());
    case ErrorCode::kUnsupportedMedia:
      return ApiError(415, "UnsupportedMedia", e.what());
    case ErrorCode::kUnknownClipId:
      return ApiError(404, "UnknownClipId", e.what());
    case ErrorCode::kEmbedderUnavailable:
      return ApiError(503, "EmbedderUnavailable", e.what());
    default:
      return ApiError(500, "Internal", std::string(e.name()) + ": " + e.what());
  }
}

json error_body(const std::string& code, const std::string& message) {
  return json{{"code", code}, {"message", message}};
}

Dataset load_dataset(const DatasetConfig& config) {
  Dataset ds;
  ds.name = config.name;
  ds.store = load_store(config.store_path);
  if (!config.index_path.empty() && std::filesystem::exists(config.index_path)) {
    ds.index = std::make_shared<const HnswIndex>(HnswIndex::load(config.index_path, ds.store));
  }
  if (!config.manifest_path.empty()) ds.catalog = read_manifest(config.manifest_path);
  ds.media_root = config.media_root;
  return ds;
}

QuerySpec parse_query_spec(const json& body, const SearchConfig& search,
                           const std::string& default_dataset) {
  if (!body.is_object()) invalid("request body must be a JSON object");
  QuerySpec spec;
  spec.texts = string_list(body, "texts");
  for (std::string& t : spec.texts) t = trim_query_text(t);
  spec.upload_refs = string_list(body, "upload_refs");
  spec.seed_clip_ids = string_list(body, "seed_clip_ids");
  spec.k = search.default_k;
  if (auto it = body.find("k"); it != body.end() && !it->is_null()) {
    spec.k = parse_k_value(*it, search.max_k);
  }
  if (auto it = body.find("cursor"); it != body.end() && !it->is_null()) {
    if (!it->is_string()) invalid("cursor must be a string");
    spec.cursor = it->get<std::string>();
  }
  spec.dedup = search.dedup_default;
  if (auto it = body.find("dedup"); it != body.end() && !it->is_null()) {
    if (!it->is_boolean()) invalid("dedup must be a boolean");
    spec.dedup = it->get<bool>();
  }
  spec.dataset = default_dataset;
  if (auto it = body.find("dataset"); it != body.end() && !it->is_null()) {
    if (!it->is_string()) invalid("dataset must be a string");
    spec.dataset = it->get<std::string>();
  }
  if (spec.texts.empty() && spec.upload_refs.empty() && spec.seed_clip_ids.empty()) {
    throw ApiError(400, "EmptyQuery", "provide at least one of texts, upload_refs, seed_clip_ids");
  }
  for (const std::string& t : spec.texts) {
    if (t.empty()) throw ApiError(400, "EmptyQuery", "query text is empty");
  }
  return spec;
}

json to_json(const QuerySpec& spec) {
  json j = {{"texts", spec.texts},   {"upload_refs", spec.upload_refs},
            {"seed_clip_ids", spec.seed_clip_ids}, {"k", spec.k},
            {"dedup", spec.dedup},   {"dataset", spec.dataset}};
  if (spec.cursor) j["cursor"] = *spec.cursor;
  return j;
}

std::string encode_cursor(std::uint64_t fingerprint, std::size_t offset) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx", static_cast<unsigned long long>(fingerprint),
                static_cast<unsigned long long>(offset ^ fingerprint));
  return buf;
}

std::size_t decode_cursor(const std::string& cursor, std::uint64_t expected_fingerprint) {
  auto hex = [&](std::size_t pos, std::uint64_t* out) {
    const char* b = cursor.data() + pos;
    auto [p, ec] = std::from_chars(b, b + 16, *out, 16);
    return ec == std::errc() && p == b + 16;
  };
  std::uint64_t fp = 0, masked = 0;
  if (cursor.size() != 32 || !hex(0, &fp) || !hex(16, &masked)) {
    throw ApiError(400, "InvalidCursor", "cursor is malformed");
  }
  if (fp != expected_fingerprint) {
    throw ApiError(400, "CursorMismatch", "cursor belongs to a different query");
  }
  return static_cast<std::size_t>(masked ^ fp);
}

std::unique_ptr<EmbedderClient> make_embedder(const EmbedderConfig& config) {
  if (config.mode == "remote") {
    return std::make_unique<RemoteEmbedder>(
        config.endpoint, config.dim,
        std::chrono::milliseconds(static_cast<long long>(config.timeout_s * 1000.0)));
  }
  return std::make_unique<MockEmbedder>(config.dim, config.mock_key);
}

SearchService::SearchService(ServiceConfig config, std::vector<Dataset> datasets,
                             std::shared_ptr<const EmbedderClient> embedder, Clock clock)
    : config_(std::move(config)),
      embedder_(std::move(embedder)),
      uploads_(std::make_unique<UploadStage>(
          std::chrono::milliseconds(static_cast<long long>(config_.server.upload_ttl_s * 1000.0)),
          std::move(clock))) {
  for (Dataset& ds : datasets) {
    if (config_.experiment_dataset && ds.name != *config_.experiment_dataset) continue;
    if (!ds.store.empty() && ds.store.dim() != embedder_->dim()) {
      throw Error(ErrorCode::kDimMismatch, "dataset '" + ds.name + "' has dim " +
                                               std::to_string(ds.store.dim()) + ", embedder has " +
                                               std::to_string(embedder_->dim()));
    }
    datasets_.push_back(std::move(ds));
  }
}

std::unique_ptr<SearchService> SearchService::from_config(const ServiceConfig& config,
                                                          Clock clock) {
  std::vector<Dataset> datasets;
  for (const DatasetConfig& dc : mounted_datasets(config)) datasets.push_back(load_dataset(dc));
  return std::make_unique<SearchService>(config, std::move(datasets),
                                         make_embedder(config.embedder), std::move(clock));
}

std::string SearchService::default_dataset() const {
  return datasets_.empty() ? std::string() : datasets_.front().name;
}

const Dataset& SearchService::dataset(const std::string& name) const {
  for (const Dataset& ds : datasets_) {
    if (ds.name == name) return ds;
  }
  if (name.empty()) throw ApiError(404, "UnknownDataset", "no datasets are mounted");
  throw ApiError(404, "UnknownDataset", "unknown dataset '" + name + "'");
}

std::uint64_t SearchService::fingerprint(const QuerySpec& spec, const Dataset& ds,
                                         const std::string* exclude) const {
  const json canon = {{"texts", spec.texts},
                      {"upload_refs", spec.upload_refs},
                      {"seed_clip_ids", spec.seed_clip_ids},
                      {"dedup", spec.dedup},
                      {"dataset", ds.name},
                      {"exclude", exclude ? json(*exclude) : json()},
                      {"store_crc", ds.store.checksum()},
                      {"store_count", ds.store.count()}};
  return keyed_hash(0, "cursor", canon.dump());
}

Embedding SearchService::resolve(const QuerySpec& spec, const Dataset& ds) const {
  QueryParts parts;
  parts.texts = spec.texts;
  for (const std::string& ref : spec.upload_refs) {
    StagedUpload up;
    switch (uploads_->get(ref, &up)) {
      case UploadStage::Status::kFound:
        parts.audio.push_back({*up.bytes, up.media});
        break;
      case UploadStage::Status::kExpired:
        throw ApiError(404, "UploadExpired", "upload '" + ref + "' has expired");
      case UploadStage::Status::kUnknown:
        throw ApiError(404, "UnknownUpload", "no upload '" + ref + "'");
    }
  }
  parts.clip_ids = spec.seed_clip_ids;
  return resolve_query(parts, *embedder_, ds.store);
}

std::vector<SearchHit> SearchService::ranked(const Dataset& ds, const Embedding& unit_query,
                                             std::size_t depth, bool dedup,
                                             const std::string* exclude) const {
  const std::size_t count = ds.store.count();
  if (count == 0 || depth == 0) return {};
  const bool exact = !ds.index || count <= config_.search.exact_threshold;
  const std::size_t ef_base =
      config_.search.ef_search ? config_.search.ef_search : (ds.index ? ds.index->params().ef_search : 0);

  // The global order is built in tiers of pool, 2*pool, 4*pool... entries.
  // Each tier only contributes entries ranking strictly after the previous
  // tier's last entry, so every page is a slice of one fixed sequence no
  // matter how deep the client pages.
  std::vector<SearchHit> global;
  std::size_t fetched = 0;
  auto extend = [&]() {
    if (fetched >= count) return false;
    const std::size_t want =
        std::min(count, fetched == 0 ? std::max<std::size_t>(config_.search.result_pool, 1) : fetched * 2);
    std::vector<SearchHit> tier;
    if (exact) {
      tier = exact_top_k(ds.store, unit_query, want);
    } else {
      tier = ds.index->search(unit_query, want, AnnSearchParams{std::max(ef_base, want), false});
    }
    if (global.empty()) {
      global = std::move(tier);
    } else {
      const SearchHit last = global.back();
      for (SearchHit& h : tier) {
        if (ranks_before(last, h)) global.push_back(std::move(h));
      }
    }
    fetched = want;
    return true;
  };

  std::vector<SearchHit> out;
  while (true) {
    out.clear();
    for (const SearchHit& h : global) {
      if (exclude && h.clip_id == *exclude) continue;
      out.push_back(h);
    }
    if (dedup) out = dedup_results(out, ds.store, config_.search.dedup_threshold, depth);
    if (out.size() >= depth || !extend()) break;
  }
  if (out.size() > depth) out.resize(depth);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

json SearchService::run(const QuerySpec& spec, const std::string* exclude) const {
  const auto start = std::chrono::steady_clock::now();
  const Dataset& ds = dataset(spec.dataset);
  const std::uint64_t fp = fingerprint(spec, ds, exclude);
  const std::size_t offset = spec.cursor ? decode_cursor(*spec.cursor, fp) : 0;

  json hits = json::array();
  std::optional<std::string> next;
  try {
    const Embedding q = resolve(spec, ds);
    // One extra entry tells whether another page exists.
    const std::vector<SearchHit> list = ranked(ds, q, offset + spec.k + 1, spec.dedup, exclude);
    for (std::size_t i = offset; i < list.size() && i < offset + spec.k; ++i) {
      hits.push_back(hit_json(list[i], ds));
    }
    if (list.size() > offset + spec.k) next = encode_cursor(fp, offset + spec.k);
  } catch (const Error& e) {
    throw to_api_error(e);
  }

  json page = {{"hits", std::move(hits)}, {"query_echo", to_json(spec)}};
  page["next_cursor"] = next ? json(*next) : json();
  page["latency_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return page;
}

json SearchService::search(const json& body) const {
  return run(parse_query_spec(body, config_.search, default_dataset()), nullptr);
}

json SearchService::similar(const std::string& clip_id, const std::optional<std::string>& k,
                            const std::optional<std::string>& cursor,
                            const std::optional<std::string>& dataset_name,
                            const std::optional<std::string>& dedup) const {
  QuerySpec spec;
  spec.seed_clip_ids = {clip_id};
  spec.k = config_.search.default_k;
  if (k) {
    std::size_t value = 0;
    auto [p, ec] = std::from_chars(k->data(), k->data() + k->size(), value);
    if (ec != std::errc() || p != k->data() + k->size() || value < 1 ||
        value > config_.search.max_k) {
      invalid("k must be in [1, " + std::to_string(config_.search.max_k) + "], got '" + *k + "'");
    }
    spec.k = value;
  }
  spec.cursor = cursor;
  spec.dedup = dedup ? parse_bool_text(*dedup) : config_.search.dedup_default;
  spec.dataset = dataset_name ? *dataset_name : default_dataset();
  const Dataset& ds = dataset(spec.dataset);
  if (!ds.store.find(clip_id)) {
    throw ApiError(404, "UnknownClipId", "unknown clip id: " + clip_id);
  }
  return run(spec, &clip_id);
}

json SearchService::datasets() const {
  json out = json::array();
  for (const Dataset& ds : datasets_) {
    out.push_back({{"name", ds.name}, {"count", ds.store.count()}, {"dim", ds.store.dim()}});
  }
  return out;
}

json SearchService::upload(std::vector<unsigned char> body, std::string_view content_type) {
  if (body.size() > config_.server.upload_cap_bytes) {
    throw ApiError(413, "PayloadTooLarge",
                   "upload of " + std::to_string(body.size()) + " bytes exceeds the cap of " +
                       std::to_string(config_.server.upload_cap_bytes));
  }
  if (body.empty()) throw ApiError(400, "EmptyPayload", "upload body is empty");
  std::optional<std::string> media = media_from_content_type(content_type);
  if (!media) {
    const std::string ct(content_type);
    const bool generic = ct.empty() || ct.rfind("application/octet-stream", 0) == 0;
    if (!generic) {
      throw ApiError(415, "UnsupportedMedia", "unsupported content type '" + ct + "'");
    }
    media = sniff_media(body);
    if (!media) throw ApiError(415, "UnsupportedMedia", "unrecognized audio container");
  }
  if (!media_matches(body, *media)) {
    throw ApiError(415, "UnsupportedMedia", "payload is not a valid " + *media + " container");
  }
  const std::size_t size = body.size();
  const std::string token = uploads_->put(std::move(body), *media);
  return json{{"upload_ref", token},
              {"media", *media},
              {"bytes", size},
              {"expires_in_s", config_.server.upload_ttl_s}};
}

MediaSource SearchService::locate_media(const std::string& clip_id,
                                       const std::optional<std::string>& dataset_name) const {
  const Dataset& ds = dataset(dataset_name ? *dataset_name : default_dataset());
  const AudioClip* clip = ds.catalog.find(clip_id);
  if (!clip) throw ApiError(404, "UnknownClipId", "unknown clip id: " + clip_id);
  const auto path = resolve_media_path(clip->media_uri, ds.media_root);
  if (!path) {
    throw ApiError(502, "MediaUnavailable", "media source '" + clip->media_uri + "' is not local");
  }
  std::error_code ec;
  const auto size = std::filesystem::file_size(*path, ec);
  if (ec || !std::ifstream(*path, std::ios::binary)) {
    throw ApiError(502, "MediaUnavailable", "media for " + clip_id + " is unreachable");
  }
  const auto hint = media_from_path(path->string());
  return MediaSource{*path, hint ? content_type_for_media(*hint) : "application/octet-stream",
                     static_cast<std::size_t>(size)};
}

MediaResponse SearchService::clip_audio(const std::string& clip_id,
                                        const std::optional<std::string>& dataset_name,
                                        const std::optional<std::string>& range) const {
  const MediaSource src = locate_media(clip_id, dataset_name);
  MediaResponse r;
  r.content_type = src.content_type;
  r.total_size = src.size;
  std::size_t begin = 0, length = src.size;
  if (range) {
    if (auto br = parse_range(*range, src.size)) {
      r.status = 206;
      r.range_begin = br->begin;
      r.range_end = br->end;
      begin = br->begin;
      length = br->end - br->begin + 1;
    }
  }
  std::ifstream in(src.path, std::ios::binary);
  r.body.resize(length);
  in.seekg(static_cast<std::streamoff>(begin));
  in.read(r.body.data(), static_cast<std::streamsize>(length));
  if (!in || in.gcount() != static_cast<std::streamsize>(length)) {
    throw ApiError(502, "MediaUnavailable", "short read on media for " + clip_id);
  }
  return r;
}

}  // namespace soundsearch::service
