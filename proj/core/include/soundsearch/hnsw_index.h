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
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soundsearch/embedding.h"
#include "soundsearch/search.h"
#include "soundsearch/vector_store.h"

namespace soundsearch {

struct HnswParams {
  std::uint32_t max_degree = 16;  // links per node on upper layers
  std::uint32_t max_degree_base = 32;  // links per node on layer 0
  std::uint32_t ef_construction = 200;
  std::uint32_t ef_search = 128;  // default beam width at query time
  std::uint64_t seed = 42;

  friend bool operator==(const HnswParams&, const HnswParams&) = default;
};

nlohmann::json to_json(const HnswParams& p);

struct AnnSearchParams {
  std::size_t ef = 0;  // 0: the index default; raised to k when smaller
  // Score every row instead of walking the graph; identical to exact_top_k.
  bool exhaustive = false;
};

// Hierarchical navigable small-world graph over a VectorStore.
//
// Traversal uses single-precision inner products; the final beam is
// re-scored with score_row() so reported scores and tie-breaks match the
// exact path. Immutable once built; concurrent searches are safe.
class HnswIndex {
 public:
  HnswIndex() = default;

  using Progress = std::function<void(std::size_t inserted, std::size_t total)>;
  static HnswIndex build(const VectorStore& store, const HnswParams& params = {},
                         const Progress& progress = {});

  // Binds to `store`; errors: CorruptHeader, VersionMismatch, TruncatedFile,
  // IndexStoreMismatch (index built for a different store).
  static HnswIndex load(const std::filesystem::path& path, const VectorStore& store);
  void save(const std::filesystem::path& path) const;

  bool built() const noexcept { return !levels_.empty(); }
  const HnswParams& params() const noexcept { return params_; }
  const VectorStore& store() const noexcept { return store_; }
  std::size_t max_level() const noexcept { return max_level_; }

  // Errors: IndexNotBuilt, plus the exact_top_k errors.
  std::vector<SearchHit> search(const Embedding& query, std::size_t k,
                                const AnnSearchParams& sp = {}) const;

  // Layer-0 neighbours of `node`; exposed for invariant checks.
  std::span<const std::uint32_t> base_links(std::size_t node) const;

 private:
  struct Candidate {
    float score;
    std::uint32_t node;
  };

  const float* vec(std::uint32_t node) const { return store_.data() + std::size_t{node} * dim_; }
  float sim(const float* q, std::uint32_t node) const;

  std::uint32_t* links(std::uint32_t node, std::size_t level);
  const std::uint32_t* links(std::uint32_t node, std::size_t level) const;
  std::uint32_t capacity(std::size_t level) const {
    return level == 0 ? params_.max_degree_base : params_.max_degree;
  }

  std::uint32_t greedy_descend(const float* q, std::uint32_t entry, std::size_t from_level,
                               std::size_t to_level) const;
  std::vector<Candidate> search_layer(const float* q, std::uint32_t entry, std::size_t ef,
                                      std::size_t level) const;
  std::vector<Candidate> select_neighbors(std::vector<Candidate> candidates, std::size_t m) const;
  void connect(std::uint32_t node, std::size_t level, const std::vector<Candidate>& neighbors);
  void insert(std::uint32_t node, std::size_t level);

  VectorStore store_;
  HnswParams params_;
  std::size_t dim_ = 0;
  std::vector<std::uint8_t> levels_;
  // Layer 0: per node [degree, link...] with max_degree_base link slots.
  std::vector<std::uint32_t> base_;
  // Upper layers: nodes with level >= 1 own a block at upper_offset_[node]
  // holding, per level 1..L, [degree, link...] with max_degree slots.
  std::vector<std::uint64_t> upper_offset_;
  std::vector<std::uint32_t> upper_;
  std::uint32_t entry_ = 0;
  std::size_t max_level_ = 0;
};

// Approximate top-k through the graph; IndexNotBuilt for an empty index.
std::vector<SearchHit> ann_top_k(const HnswIndex& index, const Embedding& query, std::size_t k,
                                 const AnnSearchParams& sp = {});

}  // namespace soundsearch
