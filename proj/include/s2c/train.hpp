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
#ifndef S2C_TRAIN_HPP
#define S2C_TRAIN_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "s2c/cnn.hpp"
#include "s2c/dataset.hpp"

namespace s2c::cnn {

struct TrainConfig {
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double lr = 0.001;
  /// When false, wall-clock columns are written as 0 so reports are byte-reproducible.
  bool record_time = true;

  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double seconds = 0.0;
  /// Mini-batch losses seen while updating during this epoch.
  std::vector<double> batch_losses;
};

struct TrainReport {
  std::vector<EpochStats> epochs;

  /// epoch,train_loss,train_acc,val_loss,val_acc,seconds
  std::string to_csv() const;
  void save_csv(const std::filesystem::path& path) const;
};

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<int> labels;
  std::vector<int> predictions;
  std::vector<float> probabilities;
  double mean_inference_ms = 0.0;
};

/// Loss, accuracy (threshold p >= 0.5 -> 1) and per-sample predictions, in chunks of `chunk` samples.
Evaluation evaluate(const Model& model, const data::Batch& batch, std::size_t chunk = 32, bool record_time = true);

/// Seeded init, then per epoch: seeded shuffle, mini-batch forward/backward/Adam,
/// followed by full train and validation evaluation.
std::pair<Model, TrainReport> train(const ModelSpec& spec, const data::DatasetManifest& manifest,
                                    const data::ExperimentSpec& experiment, const TrainConfig& cfg);

}  // namespace s2c::cnn

#endif  // S2C_TRAIN_HPP
