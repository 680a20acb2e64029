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

// Fully specified deterministic generators behind the mock embedder and the
// synthetic corpus. Everything here is defined bit-for-bit so fixtures can be
// reproduced in any language:
//
//   seed   = FNV-1a-64 over  tag || 0x00 || payload, starting from
//            (0xcbf29ce484222325 XOR key)
//   stream = SplitMix64(seed)
//   draws  = Box-Muller pairs: u1 = ((x >> 11) + 1) * 2^-53, u2 = (y >> 11) * 2^-53,
//            z0 = sqrt(-2 ln u1) cos(2 pi u2), z1 = sqrt(-2 ln u1) sin(2 pi u2)
//   vector = first D draws, divided by their L2 norm

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace soundsearch {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

constexpr std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                                std::uint64_t state = kFnvOffsetBasis) {
  for (unsigned char b : bytes) {
    state ^= b;
    state *= kFnvPrime;
  }
  return state;
}

std::uint64_t keyed_hash(std::uint64_t key, std::string_view tag,
                         std::span<const unsigned char> payload);
std::uint64_t keyed_hash(std::uint64_t key, std::string_view tag, std::string_view payload);

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// D standard-normal draws from the seeded stream (unnormalized).
std::vector<double> gaussian_draws(std::uint64_t seed, std::size_t dim);

// gaussian_draws() projected onto the unit sphere.
std::vector<double> seeded_unit_vector(std::uint64_t seed, std::size_t dim);

}  // namespace soundsearch
