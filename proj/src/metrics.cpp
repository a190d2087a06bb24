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
#include "s2c/metrics.hpp"

#include <algorithm>

#include "s2c/error.hpp"

namespace s2c::harness {

ConfusionMatrix confusion(std::span<const int> labels, std::span<const int> predictions) {
  require(labels.size() == predictions.size(), ErrorCode::kShape, "labels and predictions differ in length");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    const int p = predictions[i];
    require((y == 0 || y == 1) && (p == 0 || p == 1), ErrorCode::kDomain, "labels and predictions must be 0 or 1");
    if (y == 1) {
      p == 1 ? ++cm.tp : ++cm.fn;
    } else {
      p == 1 ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

Metrics metrics(const ConfusionMatrix& cm) {
  require(cm.total() > 0, ErrorCode::kDomain, "metrics of an empty confusion matrix");
  Metrics m;
  auto ratio = [&](double num, double den) {
    if (den == 0.0) {
      m.degenerate = true;
      return 0.0;
    }
    return num / den;
  };
  m.precision = ratio(double(cm.tp), double(cm.tp + cm.fp));
  m.recall = ratio(double(cm.tp), double(cm.tp + cm.fn));
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  m.accuracy = double(cm.tp + cm.tn) / double(cm.total());
  return m;
}

Metrics macro_average(std::span<const Metrics> reports) {
  require(!reports.empty(), ErrorCode::kDomain, "macro average of an empty list");
  // Sorting before summation makes the result independent of report order.
  auto mean_of = [&](auto field) {
    std::vector<double> values;
    values.reserve(reports.size());
    for (const Metrics& m : reports) values.push_back(m.*field);
    std::sort(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) total += v;
    return total / static_cast<double>(values.size());
  };
  Metrics avg;
  avg.precision = mean_of(&Metrics::precision);
  avg.recall = mean_of(&Metrics::recall);
  avg.f1 = mean_of(&Metrics::f1);
  avg.accuracy = mean_of(&Metrics::accuracy);
  avg.degenerate = std::any_of(reports.begin(), reports.end(), [](const Metrics& m) { return m.degenerate; });
  return avg;
}

}  // namespace s2c::harness
