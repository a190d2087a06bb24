/**
 * Copyright 2026 The s2c-vlc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef S2C_RANDOM_HPP
#define S2C_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace s2c {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; spreads nearby integers over the whole 64-bit range.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent child seed from a parent seed and a path of tags,
/// so per-record / per-sample streams never depend on generation order.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t s = mix64(parent);
  for (std::uint64_t t : tags) s = mix64(s ^ mix64(t + 0x632BE59BD9B4E019ULL));
  return s;
}

inline double uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) {
    rng.discard(1);
    return lo;
  }
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace s2c

#endif  // S2C_RANDOM_HPP
