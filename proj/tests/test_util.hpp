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
#ifndef S2C_TESTS_TEST_UTIL_HPP
#define S2C_TESTS_TEST_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "s2c/frame_codec.hpp"
#include "s2c/random.hpp"

namespace s2c::test {

inline codec::Bitstream random_bits(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  codec::Bitstream bits;
  for (std::size_t i = 0; i < n; ++i) bits.push_back(coin(rng) ? 1 : 0);
  return bits;
}

inline std::string random_latin1_text(std::size_t chars, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> printable(32, 126);
  std::string s;
  for (std::size_t i = 0; i < chars; ++i) s.push_back(static_cast<char>(printable(rng)));
  return s;
}

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("s2c_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace s2c::test

#endif  // S2C_TESTS_TEST_UTIL_HPP
