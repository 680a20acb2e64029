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
#include <initializer_list>
#include <span>
#include <vector>

namespace soundsearch {

// A point in the shared audio/text space.
//
// Query-side embeddings are held in double precision so that fusion and
// normalization round-trip exactly; persisted corpus rows are float32 (see
// VectorStore). Every component is finite by construction.
class Embedding {
 public:
  Embedding() = default;
  explicit Embedding(std::vector<double> values);
  Embedding(std::initializer_list<double> values);
  static Embedding from_floats(std::span<const float> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double norm() const;

  std::vector<float> to_floats() const;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<double> values_;
};

// Equal-dimension rows. `paired` marks that row i of an audio batch
// corresponds to row i of a text batch.
struct EmbeddingBatch {
  std::vector<Embedding> rows;
  bool paired = false;

  std::size_t size() const noexcept { return rows.size(); }
  std::size_t dim() const noexcept { return rows.empty() ? 0 : rows.front().dim(); }
};

// Norms below this are treated as the zero vector.
inline constexpr double kZeroNormEpsilon = 1e-12;

Embedding normalize(const Embedding& e);

// Cosine of the angle between a and b, clamped to [-1, 1].
double cosine_similarity(const Embedding& a, const Embedding& b);

// Mean of the parts, re-projected onto the unit sphere.
Embedding fuse_queries(std::span<const Embedding> parts);

// Symmetric InfoNCE over S_ij = audio_i . text_j / tau, averaged over both
// retrieval directions. Natural log, negated so the value is >= 0.
double contrastive_loss(const EmbeddingBatch& audio, const EmbeddingBatch& text,
                        double tau);

}  // namespace soundsearch
