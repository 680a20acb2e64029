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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "soundsearch/embedding.h"
#include "soundsearch/vector_store.h"

namespace soundsearch {

struct SearchHit {
  std::string clip_id;
  double score = 0.0;  // cosine similarity
  std::size_t rank = 0;  // 1-based
  std::size_t row = 0;  // row in the originating store

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

inline constexpr double kDefaultDedupThreshold = 0.98;

// Bounded best-k accumulator ordered by (score desc, clip id asc).
class TopKCollector {
 public:
  TopKCollector(const VectorStore& store, std::size_t k);

  void offer(std::size_t row, double score);
  // Drains the collector into rank order.
  std::vector<SearchHit> take();

 private:
  struct Entry {
    double score;
    std::size_t row;
  };
  bool better(const Entry& a, const Entry& b) const;

  const VectorStore& store_;
  std::size_t k_;
  std::vector<Entry> heap_;  // worst entry at the front
};

// Scores a candidate row exactly; the same function backs every search path
// so reported scores agree bit-for-bit.
double score_row(const VectorStore& store, std::size_t row, std::span<const double> unit_query);

// Brute-force ranking over the whole store; the oracle for approximate paths.
// Errors: EmptyStore, DimMismatch, ZeroVector, InvalidArgument (k == 0).
std::vector<SearchHit> exact_top_k(const VectorStore& store, const Embedding& query,
                                   std::size_t k);

// Exact top-k seeded with a stored clip's vector; the seed ranks first.
// Errors: UnknownClipId.
std::vector<SearchHit> search_similar(const VectorStore& store, std::string_view clip_id,
                                      std::size_t k);

// Greedy near-duplicate suppression in rank order: a hit survives iff its
// similarity to every surviving hit is below `threshold`. Ranks are
// renumbered from 1. Stops once `limit` hits survive; the result is a prefix
// of the unlimited one.
std::vector<SearchHit> dedup_results(std::span<const SearchHit> hits, const VectorStore& store,
                                     double threshold = kDefaultDedupThreshold,
                                     std::size_t limit = static_cast<std::size_t>(-1));

void check_query(const VectorStore& store, const Embedding& query, std::size_t k);

}  // namespace soundsearch
