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

#include "soundsearch/embedding.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "soundsearch/error.h"
#include "soundsearch/kernels.h"

namespace soundsearch {

namespace {

void check_finite(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::kNonFinite,
                  "embedding component " + std::to_string(i) + " is not finite");
    }
  }
}

void check_same_dim(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimMismatch, "dimension mismatch: " +
                                             std::to_string(a.dim()) + " vs " +
                                             std::to_string(b.dim()));
  }
}

}  // namespace

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  check_finite(values_);
}

Embedding::Embedding(std::initializer_list<double> values)
    : Embedding(std::vector<double>(values)) {}

Embedding Embedding::from_floats(std::span<const float> values) {
  return Embedding(std::vector<double>(values.begin(), values.end()));
}

double Embedding::norm() const { return std::sqrt(kernels::squared_norm(values_)); }

std::vector<float> Embedding::to_floats() const {
  return std::vector<float>(values_.begin(), values_.end());
}

Embedding normalize(const Embedding& e) {
  const double n = e.norm();
  if (!(n >= kZeroNormEpsilon)) {
    throw Error(ErrorCode::kZeroVector, "cannot normalize a zero vector");
  }
  std::vector<double> out(e.values().begin(), e.values().end());
  for (double& x : out) x /= n;
  return Embedding(std::move(out));
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  check_same_dim(a, b);
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kZeroNormEpsilon || nb < kZeroNormEpsilon) {
    throw Error(ErrorCode::kZeroVector, "cosine similarity of a zero vector");
  }
  const double c = kernels::dot(a.values(), b.values()) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

Embedding fuse_queries(std::span<const Embedding> parts) {
  if (parts.empty()) {
    throw Error(ErrorCode::kEmptyQuery, "no query parts to fuse");
  }
  if (parts.size() == 1) return parts.front();

  const std::size_t dim = parts.front().dim();
  std::vector<double> mean(dim, 0.0);
  for (const Embedding& p : parts) {
    check_same_dim(parts.front(), p);
    for (std::size_t i = 0; i < dim; ++i) mean[i] += p[i];
  }
  const double count = static_cast<double>(parts.size());
  for (double& x : mean) x /= count;
  try {
    return normalize(Embedding(std::move(mean)));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kZeroVector) throw;
    throw Error(ErrorCode::kZeroVector, "query parts cancel exactly");
  }
}

double contrastive_loss(const EmbeddingBatch& audio, const EmbeddingBatch& text,
                        double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::kNonPositiveTemperature, "temperature must be > 0");
  }
  if (audio.size() == 0 || audio.size() != text.size()) {
    throw Error(ErrorCode::kBatchMismatch,
                "batch sizes differ: " + std::to_string(audio.size()) + " vs " +
                    std::to_string(text.size()));
  }
  if (!audio.paired || !text.paired) {
    throw Error(ErrorCode::kBatchMismatch, "batches are not marked as paired");
  }
  const std::size_t n = audio.size();
  const std::size_t dim = audio.dim();
  for (std::size_t i = 0; i < n; ++i) {
    if (audio.rows[i].dim() != dim || text.rows[i].dim() != dim) {
      throw Error(ErrorCode::kDimMismatch, "batch rows differ in dimension");
    }
  }

  // logits[i * n + j] = audio_i . text_j / tau
  std::vector<double> logits(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      logits[i * n + j] =
          kernels::dot(audio.rows[i].values(), text.rows[j].values()) / tau;
    }
  }

  auto log_sum_exp = [&](auto&& at) {
    double m = -INFINITY;
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, at(j));
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::exp(at(j) - m);
    return m + std::log(s);
  };

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diag = logits[i * n + i];
    const double a2t = log_sum_exp([&](std::size_t j) { return logits[i * n + j]; });
    const double t2a = log_sum_exp([&](std::size_t j) { return logits[j * n + i]; });
    total += (a2t - diag) + (t2a - diag);
  }
  return std::max(0.0, total / (2.0 * static_cast<double>(n)));
}

}  // namespace soundsearch
