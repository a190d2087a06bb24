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
#include "s2c/tensor.hpp"

#include <algorithm>

#include "s2c/error.hpp"

namespace s2c::cnn {

std::size_t element_count(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) {
    require(e > 0, ErrorCode::kShape, "tensor extents must be positive");
    n *= e;
  }
  return n;
}

Tensor::Tensor(std::vector<std::size_t> shape, float fill)
    : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  require(data_.size() == element_count(shape_), ErrorCode::kShape,
          "data length does not match shape " + shape_string());
}

std::span<const float> Tensor::outer(std::size_t i) const {
  require(!shape_.empty() && i < shape_[0], ErrorCode::kShape, "outer index out of range");
  const std::size_t stride = data_.size() / shape_[0];
  return std::span<const float>(data_).subspan(i * stride, stride);
}

std::span<float> Tensor::outer(std::size_t i) {
  require(!shape_.empty() && i < shape_[0], ErrorCode::kShape, "outer index out of range");
  const std::size_t stride = data_.size() / shape_[0];
  return std::span<float>(data_).subspan(i * stride, stride);
}

void Tensor::fill(float value) { std::fill(data_.begin(), data_.end(), value); }

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
  require(element_count(shape) == data_.size(), ErrorCode::kShape, "reshape changes element count");
  return Tensor(std::move(shape), data_);
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

}  // namespace s2c::cnn
