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

#include "soundsearch/vector_store.h"

#include <zlib.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "mapped_file.h"
#include "soundsearch/error.h"
#include "soundsearch/kernels.h"

namespace soundsearch {

static_assert(std::endian::native == std::endian::little,
              "store files are little-endian; big-endian hosts need byte swapping");

struct VectorStore::Data {
  std::size_t dim = 0;
  std::size_t count = 0;
  std::vector<float> owned;
  detail::MappedFile mapping;
  const float* rows = nullptr;
  std::vector<std::string> ids;
  std::unordered_map<std::string_view, std::size_t> index;
  std::uint32_t crc = 0;
};

namespace {

constexpr std::size_t kMaxIdBytes = 1 << 16;

std::uint32_t crc_update(std::uint32_t crc, const void* data, std::size_t n) {
  const auto* p = static_cast<const Bytef*>(data);
  // zlib takes a uInt length; feed large payloads in chunks.
  while (n > 0) {
    const std::size_t chunk = std::min<std::size_t>(n, 1u << 30);
    crc = static_cast<std::uint32_t>(::crc32(crc, p, static_cast<uInt>(chunk)));
    p += chunk;
    n -= chunk;
  }
  return crc;
}

std::uint32_t crc_of_id_table(std::uint32_t crc, const std::vector<std::string>& ids) {
  for (const std::string& id : ids) {
    const std::uint32_t len = static_cast<std::uint32_t>(id.size());
    crc = crc_update(crc, &len, sizeof(len));
    crc = crc_update(crc, id.data(), id.size());
  }
  return crc;
}

void check_id(const std::string& id) {
  if (id.empty()) throw Error(ErrorCode::kInvalidArgument, "clip id must be nonempty");
  if (id.size() >= kMaxIdBytes) {
    throw Error(ErrorCode::kInvalidArgument, "clip id too long: " + id.substr(0, 64));
  }
}

void build_index(VectorStore::Data& d) {
  d.index.reserve(d.ids.size());
  for (std::size_t i = 0; i < d.ids.size(); ++i) {
    if (!d.index.emplace(d.ids[i], i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate clip id: " + d.ids[i]);
    }
  }
}

void write_header(std::ostream& out, std::size_t dim, std::uint64_t count) {
  const std::uint32_t version = kStoreVersion;
  const std::uint32_t dim32 = static_cast<std::uint32_t>(dim);
  const char reserved[16] = {};
  out.write(kStoreMagic, 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&dim32), 4);
  out.write(reinterpret_cast<const char*>(&count), 8);
  out.write(reserved, sizeof(reserved));
}

void write_id_table(std::ostream& out, const std::vector<std::string>& ids) {
  for (const std::string& id : ids) {
    const std::uint32_t len = static_cast<std::uint32_t>(id.size());
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
}

template <typename T>
T read_le(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

}  // namespace

std::size_t VectorStore::dim() const noexcept { return data_ ? data_->dim : 0; }
std::size_t VectorStore::count() const noexcept { return data_ ? data_->count : 0; }
const float* VectorStore::data() const noexcept { return data_ ? data_->rows : nullptr; }
std::uint32_t VectorStore::checksum() const noexcept { return data_ ? data_->crc : 0; }
bool VectorStore::file_backed() const noexcept { return data_ && data_->mapping.valid(); }

std::span<const float> VectorStore::row(std::size_t i) const {
  return {data_->rows + i * data_->dim, data_->dim};
}

const std::string& VectorStore::id(std::size_t i) const { return data_->ids.at(i); }

std::optional<std::size_t> VectorStore::find(std::string_view clip_id) const {
  if (!data_) return std::nullopt;
  auto it = data_->index.find(clip_id);
  if (it == data_->index.end()) return std::nullopt;
  return it->second;
}

std::size_t VectorStore::row_of(std::string_view clip_id) const {
  if (auto r = find(clip_id)) return *r;
  throw Error(ErrorCode::kUnknownClipId, "unknown clip id: " + std::string(clip_id));
}

Embedding VectorStore::embedding(std::size_t i) const {
  return Embedding::from_floats(row(i));
}

VectorStore VectorStore::from_rows(std::size_t dim, std::vector<float> rows,
                                   std::vector<std::string> ids) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "dim must be positive");
  if (rows.size() != dim * ids.size()) {
    throw Error(ErrorCode::kDimMismatch, "row payload does not match dim * count");
  }
  auto d = std::make_shared<Data>();
  d->dim = dim;
  d->count = ids.size();
  d->owned = std::move(rows);
  d->rows = d->owned.data();
  d->ids = std::move(ids);
  for (std::size_t i = 0; i < d->count; ++i) {
    check_id(d->ids[i]);
    const double n = std::sqrt(kernels::squared_norm(
        std::span<const float>(d->rows + i * dim, dim)));
    if (!(std::abs(n - 1.0) <= kRowNormTolerance)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "row for clip " + d->ids[i] + " is not unit-norm");
    }
  }
  build_index(*d);
  d->crc = crc_update(0, d->owned.data(), d->owned.size() * sizeof(float));
  d->crc = crc_of_id_table(d->crc, d->ids);
  return VectorStore(std::move(d));
}

VectorStore build_store(std::span<const std::pair<std::string, Embedding>> embeddings) {
  if (embeddings.empty()) return VectorStore::from_rows(kDefaultDim, {}, {});
  const std::size_t dim = embeddings.front().second.dim();
  std::vector<float> rows;
  rows.reserve(dim * embeddings.size());
  std::vector<std::string> ids;
  ids.reserve(embeddings.size());
  std::unordered_set<std::string_view> seen;
  for (const auto& [id, e] : embeddings) {
    check_id(id);
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate clip id: " + id);
    }
    if (e.dim() != dim) {
      throw Error(ErrorCode::kDimMismatch, "clip " + id + " has dim " +
                                               std::to_string(e.dim()) + ", expected " +
                                               std::to_string(dim));
    }
    if (e.norm() < kZeroNormEpsilon) {
      throw Error(ErrorCode::kZeroVector, "clip " + id + " has a zero embedding");
    }
    const std::vector<float> unit = normalize(e).to_floats();
    rows.insert(rows.end(), unit.begin(), unit.end());
    ids.push_back(id);
  }
  return VectorStore::from_rows(dim, std::move(rows), std::move(ids));
}

void save_store(const VectorStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open for writing: " + path.string());
  write_header(out, store.dim(), store.count());
  out.write(reinterpret_cast<const char*>(store.data()),
            static_cast<std::streamsize>(store.count() * store.dim() * sizeof(float)));
  std::vector<std::string> ids;
  ids.reserve(store.count());
  for (std::size_t i = 0; i < store.count(); ++i) ids.push_back(store.id(i));
  write_id_table(out, ids);
  const std::uint32_t crc = store.checksum();
  out.write(reinterpret_cast<const char*>(&crc), 4);
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

VectorStore load_store(const std::filesystem::path& path, bool verify_checksum) {
  auto d = std::make_shared<VectorStore::Data>();
  d->mapping = detail::MappedFile::open_read_only(path);
  const auto* base = static_cast<const unsigned char*>(d->mapping.data());
  const std::size_t size = d->mapping.size();
  const std::string where = " (" + path.string() + ")";

  if (size < kStoreHeaderSize || std::memcmp(base, kStoreMagic, 4) != 0) {
    throw Error(ErrorCode::kCorruptHeader, "not an embedding store" + where);
  }
  const auto version = read_le<std::uint32_t>(base + 4);
  if (version != kStoreVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "unsupported store version " + std::to_string(version) + where);
  }
  d->dim = read_le<std::uint32_t>(base + 8);
  const auto count = read_le<std::uint64_t>(base + 12);
  if (d->dim == 0) throw Error(ErrorCode::kCorruptHeader, "store declares dim 0" + where);
  if (count > std::numeric_limits<std::size_t>::max() / sizeof(float) / d->dim) {
    throw Error(ErrorCode::kCorruptHeader, "store declares an impossible count" + where);
  }
  d->count = static_cast<std::size_t>(count);

  const std::size_t payload_bytes = d->count * d->dim * sizeof(float);
  auto truncated = [&](const std::string& what) {
    return Error(ErrorCode::kTruncatedFile, what + where);
  };
  if (size - kStoreHeaderSize < payload_bytes + 4) {
    throw truncated("file is shorter than the declared payload");
  }
  d->rows = reinterpret_cast<const float*>(base + kStoreHeaderSize);

  std::size_t pos = kStoreHeaderSize + payload_bytes;
  const std::size_t id_end = size - 4;
  d->ids.reserve(d->count);
  for (std::size_t i = 0; i < d->count; ++i) {
    if (id_end - pos < 4) throw truncated("id table ends early");
    const auto len = read_le<std::uint32_t>(base + pos);
    pos += 4;
    if (len == 0 || id_end - pos < len) throw truncated("id table ends early");
    d->ids.emplace_back(reinterpret_cast<const char*>(base + pos), len);
    pos += len;
  }
  if (pos != id_end) throw truncated("trailing bytes after the id table");
  d->crc = read_le<std::uint32_t>(base + id_end);

  if (verify_checksum) {
    const std::uint32_t actual =
        crc_update(0, base + kStoreHeaderSize, id_end - kStoreHeaderSize);
    if (actual != d->crc) {
      throw Error(ErrorCode::kChecksumMismatch, "store checksum mismatch" + where);
    }
  }
  build_index(*d);
  return VectorStore(std::move(d));
}

StoreWriter::StoreWriter(const std::filesystem::path& path, std::size_t dim)
    : path_(path), dim_(dim), out_(path, std::ios::binary | std::ios::trunc) {
  if (dim_ == 0) throw Error(ErrorCode::kInvalidArgument, "dim must be positive");
  if (!out_) throw Error(ErrorCode::kIoError, "cannot open for writing: " + path.string());
  write_header(out_, dim_, 0);
  scratch_.resize(dim_);
}

StoreWriter::~StoreWriter() = default;

void StoreWriter::add(const std::string& clip_id, std::span<const double> values) {
  check_id(clip_id);
  if (values.size() != dim_) {
    throw Error(ErrorCode::kDimMismatch, "clip " + clip_id + " has dim " +
                                             std::to_string(values.size()) +
                                             ", expected " + std::to_string(dim_));
  }
  const double n = std::sqrt(kernels::squared_norm(values));
  if (!(n >= kZeroNormEpsilon) || !std::isfinite(n)) {
    throw Error(ErrorCode::kZeroVector, "clip " + clip_id + " has a zero embedding");
  }
  if (seen_.contains(clip_id)) {
    throw Error(ErrorCode::kDuplicateId, "duplicate clip id: " + clip_id);
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    scratch_[i] = static_cast<float>(values[i] / n);
  }
  out_.write(reinterpret_cast<const char*>(scratch_.data()),
             static_cast<std::streamsize>(dim_ * sizeof(float)));
  crc_ = crc_update(crc_, scratch_.data(), dim_ * sizeof(float));
  seen_.insert(clip_id);
  ids_.push_back(clip_id);
}

void StoreWriter::finish() {
  if (finished_) throw Error(ErrorCode::kInvalidArgument, "store writer already finished");
  finished_ = true;
  write_id_table(out_, ids_);
  crc_ = crc_of_id_table(crc_, ids_);
  out_.write(reinterpret_cast<const char*>(&crc_), 4);
  const std::uint64_t count = ids_.size();
  out_.seekp(12);
  out_.write(reinterpret_cast<const char*>(&count), 8);
  out_.close();
  if (!out_) throw Error(ErrorCode::kIoError, "write failed: " + path_.string());
}

}  // namespace soundsearch
