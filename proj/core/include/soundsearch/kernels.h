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

namespace soundsearch::kernels {

// Inner products with 64-bit accumulation. The summation order is fixed for a
// given build, so results are bit-reproducible across runs.
double dot(std::span<const float> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);
double dot(std::span<const float> a, std::span<const float> b);

double squared_norm(std::span<const double> a);
// Single-precision inner product for graph traversal, where only the
// relative order of candidates matters; never used for reported scores.
float dot_f32(const float* a, const float* b, std::size_t n);
double squared_norm(std::span<const float> a);

}  // namespace soundsearch::kernels
