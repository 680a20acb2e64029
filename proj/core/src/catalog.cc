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

#include "soundsearch/catalog.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "soundsearch/mock_rng.h"

namespace soundsearch {

namespace {

constexpr std::size_t kAudioSetClasses = 527;

Error malformed(const std::string& what) { return Error(ErrorCode::kMalformedRecord, what); }

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read media file " + path.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

AudioClip clip_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw malformed("record is not a JSON object");
  AudioClip clip;
  auto str_field = [&](const char* key, bool required) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
      if (required) throw malformed(std::string("missing field '") + key + "'");
      return std::nullopt;
    }
    if (!it->is_string()) throw malformed(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
  };

  clip.clip_id = *str_field("clip_id", true);
  if (clip.clip_id.empty()) throw malformed("clip_id is empty");
  clip.media_uri = str_field("media_uri", false).value_or("");
  clip.caption = str_field("caption", false);

  if (auto it = j.find("duration_s"); it != j.end() && !it->is_null()) {
    if (!it->is_number()) throw malformed("field 'duration_s' must be a number");
    const double d = it->get<double>();
    if (!(d > 0.0) || !std::isfinite(d)) throw malformed("duration_s must be > 0");
    clip.duration_s = d;
  }
  if (auto it = j.find("labels"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw malformed("field 'labels' must be an array");
    for (const auto& label : *it) {
      if (!label.is_string()) throw malformed("labels must be strings");
      clip.labels.push_back(label.get<std::string>());
    }
  }
  return clip;
}

nlohmann::json clip_to_json(const AudioClip& clip) {
  nlohmann::json j;
  j["clip_id"] = clip.clip_id;
  j["media_uri"] = clip.media_uri;
  j["duration_s"] = clip.duration_s ? nlohmann::json(*clip.duration_s) : nlohmann::json();
  j["labels"] = clip.labels;
  j["caption"] = clip.caption ? nlohmann::json(*clip.caption) : nlohmann::json();
  return j;
}

void Catalog::add(AudioClip clip) {
  if (clip.clip_id.empty()) throw malformed("clip_id is empty");
  if (clip.duration_s && !(*clip.duration_s > 0.0)) throw malformed("duration_s must be > 0");
  if (by_id_.contains(clip.clip_id)) {
    throw Error(ErrorCode::kDuplicateId, "duplicate clip id: " + clip.clip_id);
  }
  by_id_.emplace(clip.clip_id, clips_.size());
  clips_.push_back(std::move(clip));
}

const AudioClip* Catalog::find(std::string_view clip_id) const {
  auto it = by_id_.find(clip_id);
  return it == by_id_.end() ? nullptr : &clips_[it->second];
}

std::optional<std::vector<double>> StoreEmbeddingSource::lookup(const AudioClip& clip) {
  auto row = store_.find(clip.clip_id);
  if (!row) return std::nullopt;
  const auto r = store_.row(*row);
  return std::vector<double>(r.begin(), r.end());
}

std::optional<std::vector<double>> EmbedderEmbeddingSource::lookup(const AudioClip& clip) {
  auto path = resolve_media_path(clip.media_uri, media_root_);
  if (!path || !std::filesystem::exists(*path)) return std::nullopt;
  auto media = media_from_path(path->string());
  if (!media) {
    throw Error(ErrorCode::kUnsupportedMedia, "cannot infer media type of " + path->string());
  }
  const auto bytes = read_file_bytes(*path);
  const Embedding e = embed_audio(client_, bytes, *media);
  return std::vector<double>(e.values().begin(), e.values().end());
}

std::vector<double> synthetic_vector(std::uint64_t seed, std::size_t dim, std::string_view clip_id) {
  return seeded_unit_vector(keyed_hash(seed, "synthetic", clip_id), dim);
}

std::optional<std::vector<double>> SyntheticEmbeddingSource::lookup(const AudioClip& clip) {
  return synthetic_vector(seed_, dim_, clip.clip_id);
}

IngestResult ingest_manifest(const std::filesystem::path& manifest_path, EmbeddingSource& source,
                             const std::filesystem::path& store_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open manifest " + manifest_path.string());

  IngestResult result;
  StoreWriter writer(store_path, source.dim());
  std::string line;
  std::size_t line_no = 0;
  auto skip = [&](std::string clip_id, ErrorCode code, std::string message) {
    result.report.skipped.push_back({line_no, std::move(clip_id), code, std::move(message)});
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    ++result.report.records_read;

    AudioClip clip;
    try {
      clip = clip_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      skip("", ErrorCode::kMalformedRecord, "line " + std::to_string(line_no) + ": " + e.what());
      continue;
    } catch (const Error& e) {
      skip("", e.code(), "line " + std::to_string(line_no) + ": " + e.what());
      continue;
    }
    if (result.catalog.find(clip.clip_id) != nullptr) {
      skip(clip.clip_id, ErrorCode::kDuplicateId, "duplicate clip id: " + clip.clip_id);
      continue;
    }
    try {
      auto vec = source.lookup(clip);
      if (!vec) {
        skip(clip.clip_id, ErrorCode::kMissingEmbedding, "no embedding for clip " + clip.clip_id);
        continue;
      }
      writer.add(clip.clip_id, *vec);
    } catch (const EmbedderUnavailable&) {
      throw;
    } catch (const Error& e) {
      skip(clip.clip_id, e.code(), e.what());
      continue;
    }
    result.catalog.add(std::move(clip));
  }
  writer.finish();
  result.report.ingested = result.catalog.size();
  result.store = load_store(store_path);
  return result;
}

void write_manifest(const Catalog& catalog, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write manifest " + path.string());
  for (const AudioClip& clip : catalog.clips()) out << clip_to_json(clip).dump() << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

Catalog read_manifest(const std::filesystem::path& path, IngestReport* report) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open manifest " + path.string());
  Catalog catalog;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    if (report) ++report->records_read;
    try {
      catalog.add(clip_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      const Error* err = dynamic_cast<const Error*>(&e);
      const ErrorCode code = err ? err->code() : ErrorCode::kMalformedRecord;
      const std::string message = "line " + std::to_string(line_no) + ": " + e.what();
      if (!report) throw Error(code, message);
      report->skipped.push_back({line_no, "", code, message});
    }
  }
  if (report) report->ingested = catalog.size();
  return catalog;
}

std::string synthetic_clip_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "syn%07zu", i);
  return buf;
}

void write_synthetic_manifest(const std::filesystem::path& path, std::size_t count,
                              std::uint64_t seed) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write manifest " + path.string());
  for (std::size_t i = 0; i < count; ++i) {
    const std::string id = synthetic_clip_id(i);
    const std::uint64_t label = keyed_hash(seed, "label", id) % kAudioSetClasses;
    // Field order matches clip_to_json(); written by hand for speed at corpus scale.
    out << R"({"clip_id":")" << id << R"(","media_uri":"synthetic://)" << id
        << R"(","duration_s":10.0,"labels":["class_)" << label << R"("],"caption":null})" << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

std::optional<std::filesystem::path> resolve_media_path(std::string_view media_uri,
                                                        const std::filesystem::path& root) {
  if (media_uri.empty()) return std::nullopt;
  constexpr std::string_view kFile = "file://";
  std::filesystem::path p;
  if (media_uri.starts_with(kFile)) {
    p = std::string(media_uri.substr(kFile.size()));
  } else if (media_uri.find("://") != std::string_view::npos) {
    return std::nullopt;
  } else {
    p = std::string(media_uri);
  }
  if (p.is_relative()) p = root / p;
  return p;
}

}  // namespace soundsearch
