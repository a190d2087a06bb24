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
#include "s2c/train.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>

#include "s2c/error.hpp"
#include "s2c/kv_config.hpp"
#include "s2c/random.hpp"

namespace s2c::cnn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Tensor gather(const Tensor& src, std::span<const std::size_t> rows) {
  std::vector<std::size_t> shape = src.shape();
  shape[0] = rows.size();
  Tensor out(shape);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto from = src.outer(rows[i]);
    std::copy(from.begin(), from.end(), out.outer(i).begin());
  }
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  require(epochs >= 1, ErrorCode::kConfig, "epochs must be >= 1");
  require(batch_size >= 1, ErrorCode::kConfig, "batch_size must be >= 1");
  require(lr > 0.0, ErrorCode::kConfig, "learning rate must be positive");
}

std::string TrainReport::to_csv() const {
  std::string out = "epoch,train_loss,train_acc,val_loss,val_acc,seconds\n";
  for (const auto& e : epochs) {
    out += std::to_string(e.epoch) + "," + format_double(e.train_loss) + "," + format_double(e.train_acc) + "," +
           format_double(e.val_loss) + "," + format_double(e.val_acc) + "," + format_double(e.seconds) + "\n";
  }
  return out;
}

void TrainReport::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
  out << to_csv();
}

Evaluation evaluate(const Model& model, const data::Batch& batch, std::size_t chunk, bool record_time) {
  const std::size_t n = batch.images.dim(0);
  require(n > 0, ErrorCode::kConfig, "cannot evaluate an empty split");
  chunk = std::max<std::size_t>(chunk, 1);
  Evaluation ev;
  double loss_sum = 0.0;
  std::size_t correct = 0;
  double forward_seconds = 0.0;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    std::vector<std::size_t> rows(std::min(chunk, n - begin));
    std::iota(rows.begin(), rows.end(), begin);
    const Tensor images = gather(batch.images, rows);
    const Tensor labels = gather(batch.labels, rows);
    const auto start = Clock::now();
    const Tensor probs = forward(model, images).first;
    forward_seconds += seconds_since(start);
    loss_sum += bce_loss(probs, labels).loss * static_cast<double>(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int y = labels[i] >= 0.5F ? 1 : 0;
      const int yhat = probs[i] >= 0.5F ? 1 : 0;
      correct += y == yhat;
      ev.labels.push_back(y);
      ev.predictions.push_back(yhat);
      ev.probabilities.push_back(probs[i]);
    }
  }
  ev.loss = loss_sum / static_cast<double>(n);
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  ev.mean_inference_ms = record_time ? 1000.0 * forward_seconds / static_cast<double>(n) : 0.0;
  return ev;
}

std::pair<Model, TrainReport> train(const ModelSpec& spec, const data::DatasetManifest& manifest,
                                    const data::ExperimentSpec& experiment, const TrainConfig& cfg) {
  cfg.validate();
  const auto train_idx = data::experiment_indices(manifest, experiment, data::Split::kTrain);
  const auto val_idx = data::experiment_indices(manifest, experiment, data::Split::kVal);
  require(!train_idx.empty(), ErrorCode::kConfig, "training split is empty for this experiment");
  require(!val_idx.empty(), ErrorCode::kConfig, "validation split is empty for this experiment");

  const data::Batch train_set = data::load_batch(manifest, train_idx, experiment);
  const data::Batch val_set = data::load_batch(manifest, val_idx, experiment);
  require(train_set.images.dim(2) == spec.in_height && train_set.images.dim(3) == spec.in_width, ErrorCode::kShape,
          "dataset image size does not match the model input");

  Model model = Model::initialized(spec, derive_seed(cfg.seed, {0}));
  AdamState adam = AdamState::for_spec(spec, AdamHyper{cfg.lr});
  Rng shuffle_rng(derive_seed(cfg.seed, {1}));
  TrainReport report;

  std::vector<std::size_t> order(train_idx.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = Clock::now();
    EpochStats stats;
    stats.epoch = epoch;
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const std::span<const std::size_t> rows(order.data() + begin, end - begin);
      const Tensor images = gather(train_set.images, rows);
      const Tensor labels = gather(train_set.labels, rows);
      auto [probs, cache] = forward(model, images);
      const BceResult loss = bce_loss(probs, labels);
      const Parameters grads = backward(model, cache, loss.grad);
      adam_step(model, grads, adam);
      stats.batch_losses.push_back(loss.loss);
    }
    const Evaluation tr = evaluate(model, train_set, cfg.batch_size, false);
    const Evaluation va = evaluate(model, val_set, cfg.batch_size, false);
    stats.train_loss = tr.loss;
    stats.train_acc = tr.accuracy;
    stats.val_loss = va.loss;
    stats.val_acc = va.accuracy;
    stats.seconds = cfg.record_time ? seconds_since(start) : 0.0;
    report.epochs.push_back(std::move(stats));
  }
  return {std::move(model), std::move(report)};
}

}  // namespace s2c::cnn
