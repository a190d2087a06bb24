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
#ifndef S2C_METRICS_HPP
#define S2C_METRICS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace s2c::harness {

/// 2x2 tally with class 1 as positive.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  /// Set when a ratio had a zero denominator and was reported as 0.
  bool degenerate = false;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

ConfusionMatrix confusion(std::span<const int> labels, std::span<const int> predictions);
Metrics metrics(const ConfusionMatrix& cm);
/// Unweighted mean of every field.
Metrics macro_average(std::span<const Metrics> reports);

}  // namespace s2c::harness

#endif  // S2C_METRICS_HPP
