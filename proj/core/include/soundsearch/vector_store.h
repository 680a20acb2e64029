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
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "soundsearch/embedding.h"

namespace soundsearch {

// On-disk layout of an embedding store (all integers little-endian):
//
//   "SSX1" | version u32 | dim u32 | count u64 | reserved[16]
//   payload: count * dim float32, row-major
//   id table: count * (u32 byte length, UTF-8 bytes), row order
//   CRC32 (u32) of payload + id table
inline constexpr char kStoreMagic[4] = {'S', 'S', 'X', '1'};
inline constexpr std::uint32_t kStoreVersion = 1;
inline constexpr std::size_t kStoreHeaderSize = 36;
inline constexpr std::size_t kDefaultDim = 512;
inline constexpr double kRowNormTolerance = 1e-5;

// Immutable row-major matrix of unit-norm float32 vectors plus the row <-> clip
// id bijection. Either owns its payload or maps it from a store file; copies
// share the underlying data.
class VectorStore {
 public:
  struct Data;  // opaque; defined in vector_store.cc

  VectorStore() = default;

  std::size_t dim() const noexcept;
  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }

  std::span<const float> row(std::size_t i) const;
  const float* data() const noexcept;
  const std::string& id(std::size_t i) const;
  std::optional<std::size_t> find(std::string_view clip_id) const;

  // Throws UnknownClipId.
  std::size_t row_of(std::string_view clip_id) const;
  Embedding embedding(std::size_t i) const;

  // CRC32 over payload + id table, as written in the trailer.
  std::uint32_t checksum() const noexcept;
  bool file_backed() const noexcept;

  // Builds an owning store from already-normalized rows; validates the norm
  // and id invariants.
  static VectorStore from_rows(std::size_t dim, std::vector<float> rows,
                               std::vector<std::string> ids);

 private:
  explicit VectorStore(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  friend VectorStore load_store(const std::filesystem::path&, bool);

  std::shared_ptr<const Data> data_;
};

// Normalizes each embedding and keeps insertion order.
// Errors: DuplicateId, DimMismatch, ZeroVector (message names the clip id).
VectorStore build_store(std::span<const std::pair<std::string, Embedding>> embeddings);

void save_store(const VectorStore& store, const std::filesystem::path& path);

// Maps the file read-only. Errors: CorruptHeader, VersionMismatch,
// TruncatedFile, ChecksumMismatch.
VectorStore load_store(const std::filesystem::path& path, bool verify_checksum = true);

// Streams rows to disk without holding the payload in memory; used for
// corpora that do not fit in RAM.
class StoreWriter {
 public:
  StoreWriter(const std::filesystem::path& path, std::size_t dim);
  ~StoreWriter();
  StoreWriter(const StoreWriter&) = delete;
  StoreWriter& operator=(const StoreWriter&) = delete;

  // Normalizes before writing. Errors: DuplicateId, DimMismatch, ZeroVector.
  void add(const std::string& clip_id, std::span<const double> values);
  void add(const std::string& clip_id, const Embedding& e) { add(clip_id, e.values()); }
  bool contains(const std::string& clip_id) const { return seen_.contains(clip_id); }

  std::size_t count() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  // Writes the id table and trailer. Must be called exactly once.
  void finish();

 private:
  std::filesystem::path path_;
  std::size_t dim_;
  std::ofstream out_;
  std::vector<std::string> ids_;
  std::unordered_set<std::string> seen_;
  std::vector<float> scratch_;
  std::uint32_t crc_ = 0;
  bool finished_ = false;
};

}  // namespace soundsearch
