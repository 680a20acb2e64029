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

#include "soundsearch/hnsw_index.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <queue>

#include <nlohmann/json.hpp>

#include "soundsearch/error.h"
#include "soundsearch/kernels.h"
#include "soundsearch/mock_rng.h"

namespace soundsearch {

namespace {

constexpr char kIndexMagic[4] = {'S', 'S', 'H', '1'};
constexpr std::uint32_t kIndexVersion = 1;
constexpr std::size_t kMaxLevel = 32;

// Per-thread visit marks, reset in O(1) per query by bumping the epoch.
class VisitedTable {
 public:
  void begin(std::size_t n) {
    if (marks_.size() < n) {
      marks_.assign(n, 0);
      epoch_ = 0;
    }
    if (++epoch_ == 0) {
      std::fill(marks_.begin(), marks_.end(), 0);
      epoch_ = 1;
    }
  }
  // Returns true the first time `node` is seen in this epoch.
  bool visit(std::uint32_t node) {
    if (marks_[node] == epoch_) return false;
    marks_[node] = epoch_;
    return true;
  }

 private:
  std::vector<std::uint16_t> marks_;
  std::uint16_t epoch_ = 0;
};

VisitedTable& visited_table() {
  thread_local VisitedTable table;
  return table;
}

struct WorseFirst {
  template <typename C>
  bool operator()(const C& a, const C& b) const { return a.score > b.score; }
};
struct BetterFirst {
  template <typename C>
  bool operator()(const C& a, const C& b) const { return a.score < b.score; }
};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void write_vec(std::ostream& out, const std::vector<T>& v) {
  const std::uint64_t n = v.size();
  write_pod(out, n);
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error(ErrorCode::kTruncatedFile, "index file ends early");
  return v;
}

template <typename T>
std::vector<T> read_vec(std::istream& in, std::uint64_t max_elems) {
  const auto n = read_pod<std::uint64_t>(in);
  if (n > max_elems) throw Error(ErrorCode::kCorruptHeader, "index section larger than expected");
  std::vector<T> v(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
  if (!in) throw Error(ErrorCode::kTruncatedFile, "index file ends early");
  return v;
}

}  // namespace

nlohmann::json to_json(const HnswParams& p) {
  return {{"type", "hnsw"},
          {"max_degree", p.max_degree},
          {"max_degree_base", p.max_degree_base},
          {"ef_construction", p.ef_construction},
          {"ef_search", p.ef_search},
          {"seed", p.seed}};
}

float HnswIndex::sim(const float* q, std::uint32_t node) const {
  return kernels::dot_f32(q, vec(node), dim_);
}

std::uint32_t* HnswIndex::links(std::uint32_t node, std::size_t level) {
  if (level == 0) return base_.data() + std::size_t{node} * (params_.max_degree_base + 1);
  return upper_.data() + upper_offset_[node] + (level - 1) * (params_.max_degree + 1);
}

const std::uint32_t* HnswIndex::links(std::uint32_t node, std::size_t level) const {
  return const_cast<HnswIndex*>(this)->links(node, level);
}

std::span<const std::uint32_t> HnswIndex::base_links(std::size_t node) const {
  const std::uint32_t* l = links(static_cast<std::uint32_t>(node), 0);
  return {l + 1, l[0]};
}

std::uint32_t HnswIndex::greedy_descend(const float* q, std::uint32_t entry,
                                        std::size_t from_level, std::size_t to_level) const {
  std::uint32_t cur = entry;
  float best = sim(q, cur);
  for (std::size_t level = from_level; level >= to_level && level > 0; --level) {
    bool moved = true;
    while (moved) {
      moved = false;
      const std::uint32_t* l = links(cur, level);
      for (std::uint32_t i = 1; i <= l[0]; ++i) {
        const float s = sim(q, l[i]);
        if (s > best) {
          best = s;
          cur = l[i];
          moved = true;
        }
      }
    }
  }
  return cur;
}

std::vector<HnswIndex::Candidate> HnswIndex::search_layer(const float* q, std::uint32_t entry,
                                                          std::size_t ef,
                                                          std::size_t level) const {
  VisitedTable& visited = visited_table();
  visited.begin(store_.count());
  std::priority_queue<Candidate, std::vector<Candidate>, BetterFirst> frontier;
  std::priority_queue<Candidate, std::vector<Candidate>, WorseFirst> best;

  visited.visit(entry);
  const Candidate start{sim(q, entry), entry};
  frontier.push(start);
  best.push(start);

  while (!frontier.empty()) {
    const Candidate c = frontier.top();
    if (best.size() >= ef && c.score < best.top().score) break;
    frontier.pop();
    const std::uint32_t* l = links(c.node, level);
    const std::uint32_t degree = l[0];
    for (std::uint32_t i = 1; i <= degree; ++i) {
      if (i < degree) __builtin_prefetch(vec(l[i + 1]));
      const std::uint32_t n = l[i];
      if (!visited.visit(n)) continue;
      const float s = sim(q, n);
      if (best.size() < ef || s > best.top().score) {
        frontier.push({s, n});
        best.push({s, n});
        if (best.size() > ef) best.pop();
      }
    }
  }

  std::vector<Candidate> out(best.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = best.top();
    best.pop();
  }
  return out;  // best first
}

std::vector<HnswIndex::Candidate> HnswIndex::select_neighbors(std::vector<Candidate> candidates,
                                                              std::size_t m) const {
  // Diversity heuristic: keep a candidate only if it is closer to the base
  // point than to every neighbour already kept.
  std::vector<Candidate> kept;
  kept.reserve(m);
  for (const Candidate& c : candidates) {
    if (kept.size() >= m) break;
    bool diverse = true;
    for (const Candidate& k : kept) {
      if (kernels::dot_f32(vec(c.node), vec(k.node), dim_) > c.score) {
        diverse = false;
        break;
      }
    }
    if (diverse) kept.push_back(c);
  }
  return kept;
}

void HnswIndex::connect(std::uint32_t node, std::size_t level,
                        const std::vector<Candidate>& neighbors) {
  std::uint32_t* own = links(node, level);
  own[0] = static_cast<std::uint32_t>(neighbors.size());
  for (std::size_t i = 0; i < neighbors.size(); ++i) own[i + 1] = neighbors[i].node;

  const std::uint32_t cap = capacity(level);
  for (const Candidate& nb : neighbors) {
    std::uint32_t* l = links(nb.node, level);
    if (l[0] < cap) {
      l[1 + l[0]] = node;
      ++l[0];
      continue;
    }
    const float* base = vec(nb.node);
    std::vector<Candidate> pool;
    pool.reserve(cap + 1);
    pool.push_back({nb.score, node});
    for (std::uint32_t i = 1; i <= l[0]; ++i) {
      pool.push_back({kernels::dot_f32(base, vec(l[i]), dim_), l[i]});
    }
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
      return a.score > b.score || (a.score == b.score && a.node < b.node);
    });
    const std::vector<Candidate> pruned = select_neighbors(std::move(pool), cap);
    l[0] = static_cast<std::uint32_t>(pruned.size());
    for (std::size_t i = 0; i < pruned.size(); ++i) l[i + 1] = pruned[i].node;
  }
}

void HnswIndex::insert(std::uint32_t node, std::size_t level) {
  if (node == 0) {
    entry_ = 0;
    max_level_ = level;
    return;
  }
  const float* q = vec(node);
  std::uint32_t cur = entry_;
  if (level < max_level_) cur = greedy_descend(q, entry_, max_level_, level + 1);
  for (std::size_t l = std::min(level, max_level_) + 1; l-- > 0;) {
    std::vector<Candidate> found = search_layer(q, cur, params_.ef_construction, l);
    cur = found.front().node;
    connect(node, l, select_neighbors(std::move(found), params_.max_degree));
  }
  if (level > max_level_) {
    entry_ = node;
    max_level_ = level;
  }
}

HnswIndex HnswIndex::build(const VectorStore& store, const HnswParams& params,
                           const Progress& progress) {
  if (store.empty()) throw Error(ErrorCode::kEmptyStore, "cannot index an empty store");
  if (params.max_degree < 2 || params.max_degree_base < params.max_degree ||
      params.ef_construction == 0 || params.ef_search == 0) {
    throw Error(ErrorCode::kInvalidArgument, "invalid HNSW parameters");
  }
  if (store.count() >= std::size_t{1} << 32) {
    throw Error(ErrorCode::kInvalidArgument, "HNSW index supports fewer than 2^32 rows");
  }
  HnswIndex idx;
  idx.store_ = store;
  idx.params_ = params;
  idx.dim_ = store.dim();
  const std::size_t n = store.count();

  // Level draws: floor(-ln(u) / ln(M)), u in (0, 1].
  SplitMix64 rng(params.seed);
  const double ml = 1.0 / std::log(static_cast<double>(params.max_degree));
  idx.levels_.resize(n);
  idx.upper_offset_.assign(n, 0);
  std::uint64_t upper_slots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>((rng.next() >> 11) + 1) * (1.0 / 9007199254740992.0);
    const auto level = std::min<std::size_t>(
        static_cast<std::size_t>(std::floor(-std::log(u) * ml)), kMaxLevel);
    idx.levels_[i] = static_cast<std::uint8_t>(level);
    idx.upper_offset_[i] = upper_slots;
    upper_slots += level * (params.max_degree + 1);
  }
  idx.base_.assign(n * (params.max_degree_base + 1), 0);
  idx.upper_.assign(upper_slots, 0);

  for (std::size_t i = 0; i < n; ++i) {
    idx.insert(static_cast<std::uint32_t>(i), idx.levels_[i]);
    if (progress && ((i + 1) % 10000 == 0 || i + 1 == n)) progress(i + 1, n);
  }
  return idx;
}

std::vector<SearchHit> HnswIndex::search(const Embedding& query, std::size_t k,
                                         const AnnSearchParams& sp) const {
  if (!built()) throw Error(ErrorCode::kIndexNotBuilt, "ANN index has not been built");
  check_query(store_, query, k);
  const std::size_t ef = std::max(sp.ef ? sp.ef : std::size_t{params_.ef_search}, k);
  if (sp.exhaustive || ef >= store_.count()) return exact_top_k(store_, query, k);

  const Embedding unit = normalize(query);
  const std::vector<float> qf = unit.to_floats();
  const std::uint32_t ep = greedy_descend(qf.data(), entry_, max_level_, 1);
  const std::vector<Candidate> beam = search_layer(qf.data(), ep, ef, 0);

  TopKCollector top(store_, k);
  for (const Candidate& c : beam) top.offer(c.node, score_row(store_, c.node, unit.values()));
  return top.take();
}

void HnswIndex::save(const std::filesystem::path& path) const {
  if (!built()) throw Error(ErrorCode::kIndexNotBuilt, "ANN index has not been built");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open for writing: " + path.string());
  out.write(kIndexMagic, 4);
  write_pod(out, kIndexVersion);
  write_pod(out, static_cast<std::uint32_t>(dim_));
  write_pod(out, static_cast<std::uint64_t>(store_.count()));
  write_pod(out, store_.checksum());
  write_pod(out, params_.max_degree);
  write_pod(out, params_.max_degree_base);
  write_pod(out, params_.ef_construction);
  write_pod(out, params_.ef_search);
  write_pod(out, params_.seed);
  write_pod(out, entry_);
  write_pod(out, static_cast<std::uint32_t>(max_level_));
  write_vec(out, levels_);
  write_vec(out, base_);
  write_vec(out, upper_offset_);
  write_vec(out, upper_);
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

HnswIndex HnswIndex::load(const std::filesystem::path& path, const VectorStore& store) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open index " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kIndexMagic, 4) != 0) {
    throw Error(ErrorCode::kCorruptHeader, "not an ANN index file: " + path.string());
  }
  if (read_pod<std::uint32_t>(in) != kIndexVersion) {
    throw Error(ErrorCode::kVersionMismatch, "unsupported index version: " + path.string());
  }
  const auto dim = read_pod<std::uint32_t>(in);
  const auto count = read_pod<std::uint64_t>(in);
  const auto crc = read_pod<std::uint32_t>(in);
  if (dim != store.dim() || count != store.count() || crc != store.checksum()) {
    throw Error(ErrorCode::kIndexStoreMismatch,
                "index " + path.string() + " was built for a different store");
  }
  HnswIndex idx;
  idx.store_ = store;
  idx.dim_ = dim;
  idx.params_.max_degree = read_pod<std::uint32_t>(in);
  idx.params_.max_degree_base = read_pod<std::uint32_t>(in);
  idx.params_.ef_construction = read_pod<std::uint32_t>(in);
  idx.params_.ef_search = read_pod<std::uint32_t>(in);
  idx.params_.seed = read_pod<std::uint64_t>(in);
  idx.entry_ = read_pod<std::uint32_t>(in);
  idx.max_level_ = read_pod<std::uint32_t>(in);
  if (idx.params_.max_degree < 2 || idx.params_.max_degree_base < idx.params_.max_degree ||
      idx.max_level_ > kMaxLevel || (count > 0 && idx.entry_ >= count)) {
    throw Error(ErrorCode::kCorruptHeader, "index header is inconsistent: " + path.string());
  }
  const std::uint64_t base_slots = count * (idx.params_.max_degree_base + 1);
  idx.levels_ = read_vec<std::uint8_t>(in, count);
  idx.base_ = read_vec<std::uint32_t>(in, base_slots);
  idx.upper_offset_ = read_vec<std::uint64_t>(in, count);
  idx.upper_ = read_vec<std::uint32_t>(in, count * kMaxLevel * (idx.params_.max_degree + 1));
  if (idx.levels_.size() != count || idx.base_.size() != base_slots ||
      idx.upper_offset_.size() != count) {
    throw Error(ErrorCode::kTruncatedFile, "index sections do not match the store size");
  }
  in.peek();
  if (!in.eof()) throw Error(ErrorCode::kTruncatedFile, "trailing bytes in index file");

  const std::uint32_t base_cap = idx.params_.max_degree_base;
  for (std::uint64_t node = 0; node < count; ++node) {
    const std::uint32_t* l = idx.base_.data() + node * (base_cap + 1);
    bool ok = l[0] <= base_cap;
    for (std::uint32_t i = 1; ok && i <= l[0]; ++i) ok = l[i] < count;
    const std::uint64_t upper_end =
        idx.upper_offset_[node] + std::uint64_t{idx.levels_[node]} * (idx.params_.max_degree + 1);
    if (!ok || idx.levels_[node] > idx.max_level_ || upper_end > idx.upper_.size()) {
      throw Error(ErrorCode::kCorruptHeader, "index graph is inconsistent: " + path.string());
    }
  }
  return idx;
}

std::vector<SearchHit> ann_top_k(const HnswIndex& index, const Embedding& query, std::size_t k,
                                 const AnnSearchParams& sp) {
  return index.search(query, k, sp);
}

}  // namespace soundsearch
