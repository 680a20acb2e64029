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

#include "soundsearch/search.h"

#include <algorithm>
#include <cmath>

#include "soundsearch/error.h"
#include "soundsearch/kernels.h"

namespace soundsearch {

TopKCollector::TopKCollector(const VectorStore& store, std::size_t k)
    : store_(store), k_(k) {
  heap_.reserve(std::min<std::size_t>(k, 1 << 20));
}

bool TopKCollector::better(const Entry& a, const Entry& b) const {
  if (a.score != b.score) return a.score > b.score;
  return store_.id(a.row) < store_.id(b.row);
}

void TopKCollector::offer(std::size_t row, double score) {
  const Entry e{score, row};
  auto cmp = [this](const Entry& a, const Entry& b) { return better(a, b); };
  if (heap_.size() < k_) {
    heap_.push_back(e);
    std::push_heap(heap_.begin(), heap_.end(), cmp);
    return;
  }
  if (k_ == 0) return;
  const Entry& worst = heap_.front();
  if (score < worst.score) return;
  if (!better(e, worst)) return;
  std::pop_heap(heap_.begin(), heap_.end(), cmp);
  heap_.back() = e;
  std::push_heap(heap_.begin(), heap_.end(), cmp);
}

std::vector<SearchHit> TopKCollector::take() {
  std::sort(heap_.begin(), heap_.end(),
            [this](const Entry& a, const Entry& b) { return better(a, b); });
  std::vector<SearchHit> hits;
  hits.reserve(heap_.size());
  for (std::size_t i = 0; i < heap_.size(); ++i) {
    hits.push_back({store_.id(heap_[i].row), heap_[i].score, i + 1, heap_[i].row});
  }
  heap_.clear();
  return hits;
}

double score_row(const VectorStore& store, std::size_t row, std::span<const double> unit_query) {
  return std::clamp(kernels::dot(store.row(row), unit_query), -1.0, 1.0);
}

void check_query(const VectorStore& store, const Embedding& query, std::size_t k) {
  if (store.empty()) throw Error(ErrorCode::kEmptyStore, "store is empty");
  if (query.dim() != store.dim()) {
    throw Error(ErrorCode::kDimMismatch, "query dim " + std::to_string(query.dim()) +
                                             " does not match store dim " +
                                             std::to_string(store.dim()));
  }
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
}

std::vector<SearchHit> exact_top_k(const VectorStore& store, const Embedding& query,
                                   std::size_t k) {
  check_query(store, query, k);
  const Embedding unit = normalize(query);
  TopKCollector top(store, std::min(k, store.count()));
  for (std::size_t r = 0; r < store.count(); ++r) {
    top.offer(r, score_row(store, r, unit.values()));
  }
  return top.take();
}

std::vector<SearchHit> search_similar(const VectorStore& store, std::string_view clip_id,
                                      std::size_t k) {
  const std::size_t row = store.row_of(clip_id);
  return exact_top_k(store, store.embedding(row), k);
}

std::vector<SearchHit> dedup_results(std::span<const SearchHit> hits, const VectorStore& store,
                                     double threshold, std::size_t limit) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dedup threshold must be in (0, 1]");
  }
  std::vector<SearchHit> kept;
  std::vector<std::size_t> kept_rows;
  for (const SearchHit& h : hits) {
    if (kept.size() >= limit) break;
    const std::size_t row =
        (h.row < store.count() && store.id(h.row) == h.clip_id) ? h.row : store.row_of(h.clip_id);
    const auto v = store.row(row);
    const double nv = std::sqrt(kernels::squared_norm(v));
    bool duplicate = false;
    for (std::size_t kr : kept_rows) {
      const auto u = store.row(kr);
      const double sim = kernels::dot(v, u) / (nv * std::sqrt(kernels::squared_norm(u)));
      if (sim >= threshold) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    kept_rows.push_back(row);
    kept.push_back(h);
    kept.back().row = row;
    kept.back().rank = kept.size();
  }
  return kept;
}

}  // namespace soundsearch
