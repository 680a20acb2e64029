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

#include "soundsearch/mock_rng.h"

#include <cmath>
#include <numbers>

#include "soundsearch/kernels.h"

namespace soundsearch {

std::uint64_t keyed_hash(std::uint64_t key, std::string_view tag,
                         std::span<const unsigned char> payload) {
  std::uint64_t h = kFnvOffsetBasis ^ key;
  h = fnv1a64({reinterpret_cast<const unsigned char*>(tag.data()), tag.size()}, h);
  const unsigned char sep = 0;
  h = fnv1a64({&sep, 1}, h);
  return fnv1a64(payload, h);
}

std::uint64_t keyed_hash(std::uint64_t key, std::string_view tag, std::string_view payload) {
  return keyed_hash(
      key, tag, {reinterpret_cast<const unsigned char*>(payload.data()), payload.size()});
}

std::vector<double> gaussian_draws(std::uint64_t seed, std::size_t dim) {
  constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
  SplitMix64 rng(seed);
  std::vector<double> out(dim);
  for (std::size_t i = 0; i < dim; i += 2) {
    const double u1 = static_cast<double>((rng.next() >> 11) + 1) * kInv53;
    const double u2 = static_cast<double>(rng.next() >> 11) * kInv53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    out[i] = r * std::cos(theta);
    if (i + 1 < dim) out[i + 1] = r * std::sin(theta);
  }
  return out;
}

std::vector<double> seeded_unit_vector(std::uint64_t seed, std::size_t dim) {
  std::vector<double> v = gaussian_draws(seed, dim);
  const double n = std::sqrt(kernels::squared_norm(v));
  for (double& x : v) x /= n;
  return v;
}

}  // namespace soundsearch
