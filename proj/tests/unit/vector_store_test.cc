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

#include <cstring>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <zlib.h>

#include "soundsearch/vector_store.h"
#include "test_support.h"

namespace soundsearch {
namespace {

using test_support::read_bytes;
using test_support::TempDir;
using test_support::throws_code;
using test_support::write_bytes;

std::uint32_t u32_at(const std::vector<unsigned char>& b, std::size_t pos) {
  std::uint32_t v;
  std::memcpy(&v, b.data() + pos, 4);
  return v;
}

std::uint64_t u64_at(const std::vector<unsigned char>& b, std::size_t pos) {
  std::uint64_t v;
  std::memcpy(&v, b.data() + pos, 8);
  return v;
}

TEST(VectorStore, RoundTripIsByteIdentical) {
  TempDir dir;
  const VectorStore store = test_support::random_store(57, 24, 3);
  save_store(store, dir / "a.ssx");
  const VectorStore loaded = load_store(dir / "a.ssx");
  save_store(loaded, dir / "b.ssx");
  EXPECT_EQ(read_bytes(dir / "a.ssx"), read_bytes(dir / "b.ssx"));
  EXPECT_EQ(loaded.checksum(), store.checksum());
  ASSERT_EQ(loaded.count(), store.count());
  ASSERT_EQ(loaded.dim(), store.dim());
  for (std::size_t i = 0; i < store.count(); ++i) {
    EXPECT_EQ(loaded.id(i), store.id(i));
    const auto a = store.row(i), b = loaded.row(i);
    EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size_bytes()), 0);
  }
  EXPECT_TRUE(loaded.file_backed());
}

TEST(VectorStore, LayoutMatchesFormat) {
  TempDir dir;
  const VectorStore store = test_support::random_store(5, 8, 4);
  save_store(store, dir / "s.ssx");
  const auto bytes = read_bytes(dir / "s.ssx");
  EXPECT_EQ(std::memcmp(bytes.data(), "SSX1", 4), 0);
  EXPECT_EQ(u32_at(bytes, 4), kStoreVersion);
  EXPECT_EQ(u32_at(bytes, 8), 8u);
  EXPECT_EQ(u64_at(bytes, 12), 5u);
  for (std::size_t i = 20; i < kStoreHeaderSize; ++i) EXPECT_EQ(bytes[i], 0) << "reserved " << i;
  std::size_t ids = 0;
  for (std::size_t i = 0; i < 5; ++i) ids += 4 + store.id(i).size();
  ASSERT_EQ(bytes.size(), kStoreHeaderSize + 5 * 8 * 4 + ids + 4);
  // Trailer CRC32 covers the payload and the id table.
  const uLong crc = crc32(0, bytes.data() + kStoreHeaderSize,
                          static_cast<uInt>(bytes.size() - kStoreHeaderSize - 4));
  EXPECT_EQ(u32_at(bytes, bytes.size() - 4), static_cast<std::uint32_t>(crc));
  EXPECT_EQ(store.checksum(), static_cast<std::uint32_t>(crc));
}

TEST(VectorStore, RowsAreUnitNormAndIdsIndexed) {
  const VectorStore store = test_support::random_store(20, 16, 5);
  for (std::size_t i = 0; i < store.count(); ++i) {
    EXPECT_NEAR(store.embedding(i).norm(), 1.0, kRowNormTolerance);
    EXPECT_EQ(store.row_of(store.id(i)), i);
  }
  EXPECT_FALSE(store.find("nope").has_value());
  EXPECT_TRUE(throws_code([&] { store.row_of("nope"); }, ErrorCode::kUnknownClipId));
}

TEST(VectorStore, BuildNormalizes) {
  const std::vector<std::pair<std::string, Embedding>> rows{{"x", Embedding{3.0, 4.0}}};
  const VectorStore store = build_store(rows);
  EXPECT_NEAR(store.row(0)[0], 0.6f, 1e-7);
  EXPECT_NEAR(store.row(0)[1], 0.8f, 1e-7);
}

TEST(VectorStore, BuildErrors) {
  const std::vector<std::pair<std::string, Embedding>> dup{{"x", Embedding{1.0, 0.0}},
                                                           {"x", Embedding{0.0, 1.0}}};
  EXPECT_TRUE(throws_code([&] { build_store(dup); }, ErrorCode::kDuplicateId));
  const std::vector<std::pair<std::string, Embedding>> mixed{{"x", Embedding{1.0, 0.0}},
                                                             {"y", Embedding{1.0}}};
  EXPECT_TRUE(throws_code([&] { build_store(mixed); }, ErrorCode::kDimMismatch));
  const std::vector<std::pair<std::string, Embedding>> zero{{"x", Embedding{0.0, 0.0}}};
  EXPECT_TRUE(throws_code([&] { build_store(zero); }, ErrorCode::kZeroVector));
}

TEST(VectorStore, WriterMatchesBuildAndSave) {
  TempDir dir;
  std::mt19937_64 rng(6);
  std::vector<std::pair<std::string, Embedding>> rows;
  for (std::size_t i = 0; i < 33; ++i) {
    rows.emplace_back("clip-" + std::to_string(i), Embedding(test_support::gaussian_vector(rng, 12)));
  }
  save_store(build_store(rows), dir / "a.ssx");
  StoreWriter w(dir / "b.ssx", 12);
  for (const auto& [id, e] : rows) w.add(id, e);
  EXPECT_TRUE(w.contains("clip-3"));
  EXPECT_TRUE(throws_code([&] { w.add("clip-3", rows[0].second); }, ErrorCode::kDuplicateId));
  EXPECT_TRUE(throws_code([&] { w.add("other", Embedding{1.0}); }, ErrorCode::kDimMismatch));
  w.finish();
  EXPECT_EQ(read_bytes(dir / "a.ssx"), read_bytes(dir / "b.ssx"));
}

TEST(VectorStore, EmptyStoreRoundTrips) {
  TempDir dir;
  StoreWriter w(dir / "e.ssx", 4);
  w.finish();
  const VectorStore s = load_store(dir / "e.ssx");
  EXPECT_EQ(s.count(), 0u);
  EXPECT_EQ(s.dim(), 4u);
}

class CorruptStore : public ::testing::Test {
 protected:
  void SetUp() override {
    save_store(test_support::random_store(10, 8, 7), dir_ / "ok.ssx");
    bytes_ = read_bytes(dir_ / "ok.ssx");
  }
  ::testing::AssertionResult loads_with(const std::vector<unsigned char>& bytes, ErrorCode code) {
    write_bytes(dir_ / "bad.ssx", bytes);
    return throws_code([&] { load_store(dir_ / "bad.ssx"); }, code);
  }
  TempDir dir_;
  std::vector<unsigned char> bytes_;
};

TEST_F(CorruptStore, WrongMagic) {
  auto b = bytes_;
  b[0] = 'X';
  EXPECT_TRUE(loads_with(b, ErrorCode::kCorruptHeader));
}

TEST_F(CorruptStore, ShorterThanHeader) {
  EXPECT_TRUE(loads_with({'S', 'S', 'X', '1', 1, 0}, ErrorCode::kCorruptHeader));
  EXPECT_TRUE(loads_with({}, ErrorCode::kCorruptHeader));
}

TEST_F(CorruptStore, VersionMismatch) {
  auto b = bytes_;
  b[4] = 2;
  EXPECT_TRUE(loads_with(b, ErrorCode::kVersionMismatch));
}

TEST_F(CorruptStore, ZeroDim) {
  auto b = bytes_;
  std::memset(b.data() + 8, 0, 4);
  EXPECT_TRUE(loads_with(b, ErrorCode::kCorruptHeader));
}

// Header says 10 rows, but only 9 rows of payload (and their ids) follow.
TEST_F(CorruptStore, CountExceedsPayload) {
  TempDir dir;
  save_store(test_support::random_store(9, 8, 7), dir / "nine.ssx");
  auto b = read_bytes(dir / "nine.ssx");
  const std::uint64_t ten = 10;
  std::memcpy(b.data() + 12, &ten, 8);
  EXPECT_TRUE(loads_with(b, ErrorCode::kTruncatedFile));
}

TEST_F(CorruptStore, CutMidPayload) {
  auto b = bytes_;
  b.resize(kStoreHeaderSize + 100);
  EXPECT_TRUE(loads_with(b, ErrorCode::kTruncatedFile));
}

TEST_F(CorruptStore, CutMidIdTable) {
  auto b = bytes_;
  b.resize(b.size() - 9);
  EXPECT_TRUE(loads_with(b, ErrorCode::kTruncatedFile));
}

TEST_F(CorruptStore, TrailingBytes) {
  auto b = bytes_;
  b.insert(b.end() - 4, {0, 0, 0});
  EXPECT_TRUE(loads_with(b, ErrorCode::kTruncatedFile));
}

TEST_F(CorruptStore, FlippedPayloadBit) {
  auto b = bytes_;
  b[kStoreHeaderSize + 17] ^= 0x01;
  EXPECT_TRUE(loads_with(b, ErrorCode::kChecksumMismatch));
  write_bytes(dir_ / "bad.ssx", b);
  EXPECT_NO_THROW(load_store(dir_ / "bad.ssx", /*verify_checksum=*/false));
}

TEST_F(CorruptStore, MissingFile) {
  EXPECT_TRUE(throws_code([&] { load_store(dir_ / "absent.ssx"); }, ErrorCode::kIoError));
}

}  // namespace
}  // namespace soundsearch
