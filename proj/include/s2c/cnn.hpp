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
#ifndef S2C_CNN_HPP
#define S2C_CNN_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "s2c/tensor.hpp"

namespace s2c::cnn {

/// Conv(K1, 3x3, valid, ReLU) -> Conv(K2, 3x3, valid, ReLU) -> MaxPool 2x2
/// -> Flatten -> Dense(D, ReLU) -> Dense(1, logistic).
struct ModelSpec {
  std::size_t in_channels = 1;
  std::size_t in_height = 100;
  std::size_t in_width = 100;
  std::size_t conv1_filters = 32;
  std::size_t conv2_filters = 16;
  std::size_t dense_units = 128;

  static ModelSpec standard() { return {}; }
  /// 1x8x8 input, 2 + 2 filters, 4 hidden units; small enough for finite differences.
  static ModelSpec reduced() { return {1, 8, 8, 2, 2, 4}; }

  std::size_t conv1_height() const { return in_height - 2; }
  std::size_t conv1_width() const { return in_width - 2; }
  std::size_t conv2_height() const { return in_height - 4; }
  std::size_t conv2_width() const { return in_width - 4; }
  std::size_t pooled_height() const { return conv2_height() / 2; }
  std::size_t pooled_width() const { return conv2_width() / 2; }
  std::size_t flat_size() const { return conv2_filters * pooled_height() * pooled_width(); }

  /// Per-sample activation shapes, input first, probability last.
  std::vector<std::vector<std::size_t>> activation_shapes() const;
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Trainable tensors in a fixed order; the same order is used on disk.
struct Parameters {
  Tensor conv1_w;  // K1 x C x 3 x 3
  Tensor conv1_b;  // K1
  Tensor conv2_w;  // K2 x K1 x 3 x 3
  Tensor conv2_b;  // K2
  Tensor dense_w;  // D x flat
  Tensor dense_b;  // D
  Tensor out_w;    // 1 x D
  Tensor out_b;    // 1

  static constexpr std::size_t kTensorCount = 8;

  static Parameters zeros(const ModelSpec& spec);
  std::array<Tensor*, kTensorCount> tensors();
  std::array<const Tensor*, kTensorCount> tensors() const;
  std::size_t count() const;

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

class Model {
 public:
  /// All parameters zero.
  explicit Model(const ModelSpec& spec = ModelSpec::standard());
  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static Model initialized(const ModelSpec& spec, std::uint64_t seed);

  const ModelSpec& spec() const noexcept { return spec_; }
  const Parameters& params() const noexcept { return params_; }
  /// Any mutable access invalidates outstanding forward caches.
  Parameters& mutable_params() noexcept {
    ++version_;
    return params_;
  }
  std::uint64_t version() const noexcept { return version_; }

 private:
  ModelSpec spec_;
  Parameters params_;
  std::uint64_t version_ = 0;
};

// ---------------------------------------------------------------- layers

/// Cross-correlation without padding or stride:
/// out[k,i,j] = bias[k] + sum_{c,u,v} input[c,i+u,j+v] * kernels[k,c,u,v].
Tensor conv2d_valid(const Tensor& input, const Tensor& kernels, const Tensor& bias);

/// Disjoint 2x2 max; argmax holds the flat input index of each winner (first max on ties).
std::pair<Tensor, std::vector<std::uint32_t>> maxpool2(const Tensor& input);

/// out = weights * input + bias, weights O x N.
Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias);

// ---------------------------------------------------------------- network

struct ForwardCache {
  const Model* model = nullptr;
  std::uint64_t model_version = 0;
  std::size_t batch = 0;
  Tensor input;   // B x C x H x W
  Tensor conv1;   // post-ReLU
  Tensor conv2;   // post-ReLU
  Tensor pooled;
  std::vector<std::uint32_t> argmax;
  Tensor hidden;  // post-ReLU, B x D
  Tensor probs;   // B x 1
};

/// Probabilities are clamped to [1e-7, 1 - 1e-7].
std::pair<Tensor, ForwardCache> forward(const Model& model, const Tensor& batch);

/// Probability for one C x H x W image without keeping a cache.
float predict(const Model& model, std::span<const float> image);

struct BceResult {
  double loss = 0.0;
  Tensor grad;  // dL/dp, B x 1
};

/// Mean binary cross-entropy with p clamped to [1e-7, 1 - 1e-7].
BceResult bce_loss(const Tensor& probs, const Tensor& labels);

/// Gradients of the loss whose derivative w.r.t. the probabilities is `dprob`.
Parameters backward(const Model& model, const ForwardCache& cache, const Tensor& dprob);

// ---------------------------------------------------------------- optimizer

struct AdamHyper {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamHyper hyper;
  std::uint64_t t = 0;
  Parameters m;
  Parameters v;

  static AdamState for_spec(const ModelSpec& spec, AdamHyper hyper = {});
};

void adam_step(Parameters& params, const Parameters& grads, AdamState& state);
void adam_step(Model& model, const Parameters& grads, AdamState& state);

// ---------------------------------------------------------------- persistence

/// "S2CW", u16 version, u16 tensor count, then per tensor: u8 rank,
/// u32 extents, raw little-endian float32 values.
void save_weights(const Model& model, const std::filesystem::path& path);
Model load_weights(const std::filesystem::path& path, const ModelSpec& expected = ModelSpec::standard());

std::size_t weight_file_size(const ModelSpec& spec);

}  // namespace s2c::cnn

#endif  // S2C_CNN_HPP
