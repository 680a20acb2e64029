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

// Shared helpers for the unit and acceptance tests.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "soundsearch/catalog.h"
#include "soundsearch/embedding.h"
#include "soundsearch/error.h"
#include "soundsearch/vector_store.h"

namespace soundsearch::test_support {

// Passes iff fn() throws soundsearch::Error carrying `code`.
template <typename Fn>
::testing::AssertionResult throws_code(Fn&& fn, ErrorCode code) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == code) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure()
           << "threw " << e.name() << " (" << e.what() << "), expected " << code_name(code);
  } catch (const std::exception& e) {
    return ::testing::AssertionFailure() << "threw non-library exception: " << e.what();
  }
  return ::testing::AssertionFailure() << "did not throw, expected " << code_name(code);
}

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(SOUNDSEARCH_FIXTURE_DIR) / name;
}

// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("soundsearch_test_" + std::to_string(rd()) + "_" + std::to_string(++counter));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& p, const std::vector<unsigned char>& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Minimal 16-bit mono PCM wav holding a sine tone.
inline std::vector<unsigned char> make_wav(std::size_t samples, double freq_hz = 440.0,
                                           std::uint32_t rate = 16000) {
  std::vector<unsigned char> out;
  auto put32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
  };
  auto put16 = [&](std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v));
    out.push_back(static_cast<unsigned char>(v >> 8));
  };
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples * 2);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put32(36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put32(16);
  put16(1);
  put16(1);
  put32(rate);
  put32(rate * 2);
  put16(2);
  put16(16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put32(data_bytes);
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = std::sin(2.0 * 3.14159265358979323846 * freq_hz * static_cast<double>(i) / rate);
    put16(static_cast<std::uint16_t>(static_cast<std::int16_t>(s * 12000.0)));
  }
  return out;
}

// Standard-normal direction, not normalized.
inline std::vector<double> gaussian_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = n(rng);
  return v;
}

inline Embedding random_unit(std::mt19937_64& rng, std::size_t dim) {
  return normalize(Embedding(gaussian_vector(rng, dim)));
}

inline std::string clip_name(std::size_t i) { return "c" + std::to_string(i + 1); }

// Store of `count` random unit rows with ids c1, c2, ...
inline VectorStore random_store(std::size_t count, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::string, Embedding>> rows;
  rows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) rows.emplace_back(clip_name(i), random_unit(rng, dim));
  return build_store(rows);
}

// Query scripts shipped as the fixture query corpus: (id, text).
inline std::vector<std::pair<std::string, std::string>> search_scripts() {
  std::ifstream in(fixture_path("search_scripts.tsv"));
  std::vector<std::pair<std::string, std::string>> out;
  for (std::string line; std::getline(in, line);) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

// A small catalog whose clips have local wav media and captions, with a
// store written next to it. Layout: <dir>/fixture.ssx, fixture.ssx.manifest.jsonl,
// media/<id>.wav.
struct FixtureCorpus {
  std::filesystem::path store_path;
  std::filesystem::path manifest_path;
  std::filesystem::path media_dir;
  VectorStore store;
  Catalog catalog;
};

inline FixtureCorpus make_fixture_corpus(const std::filesystem::path& dir, std::size_t count,
                                         std::size_t dim, std::uint64_t seed = 11) {
  FixtureCorpus f;
  f.media_dir = dir / "media";
  std::filesystem::create_directories(f.media_dir);
  f.store_path = dir / "fixture.ssx";
  f.manifest_path = dir / "fixture.ssx.manifest.jsonl";
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::string, Embedding>> rows;
  for (std::size_t i = 0; i < count; ++i) {
    AudioClip clip;
    clip.clip_id = clip_name(i);
    clip.media_uri = "media/" + clip.clip_id + ".wav";
    clip.duration_s = 10.0;
    clip.labels = {"class_" + std::to_string(i % 7)};
    clip.caption = "fixture clip " + std::to_string(i + 1);
    write_bytes(f.media_dir / (clip.clip_id + ".wav"), make_wav(200 + i, 200.0 + i));
    rows.emplace_back(clip.clip_id, random_unit(rng, dim));
    f.catalog.add(std::move(clip));
  }
  save_store(build_store(rows), f.store_path);
  write_manifest(f.catalog, f.manifest_path);
  f.store = load_store(f.store_path);
  return f;
}

}  // namespace soundsearch::test_support
