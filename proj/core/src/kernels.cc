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

#include "soundsearch/kernels.h"

#include <cassert>

namespace soundsearch::kernels {

namespace {

template <typename A, typename B>
double dot_impl(const A* a, const B* b, std::size_t n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

}  // namespace

double dot(std::span<const float> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return dot_impl(a.data(), b.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return dot_impl(a.data(), b.data(), a.size());
}

double dot(std::span<const float> a, std::span<const float> b) {
  assert(a.size() == b.size());
  return dot_impl(a.data(), b.data(), a.size());
}

float dot_f32(const float* a, const float* b, std::size_t n) {
  float acc = 0.0f;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm(std::span<const double> a) {
  return dot_impl(a.data(), a.data(), a.size());
}

double squared_norm(std::span<const float> a) {
  return dot_impl(a.data(), a.data(), a.size());
}

}  // namespace soundsearch::kernels
