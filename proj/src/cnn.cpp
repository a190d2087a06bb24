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
#include "s2c/cnn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>

#include "s2c/error.hpp"
#include "s2c/random.hpp"

namespace s2c::cnn {

// ---------------------------------------------------------------- spec

std::vector<std::vector<std::size_t>> ModelSpec::activation_shapes() const {
  return {
      {in_channels, in_height, in_width},
      {conv1_filters, conv1_height(), conv1_width()},
      {conv2_filters, conv2_height(), conv2_width()},
      {conv2_filters, pooled_height(), pooled_width()},
      {flat_size()},
      {dense_units},
      {1},
  };
}

void ModelSpec::validate() const {
  require(in_channels > 0 && conv1_filters > 0 && conv2_filters > 0 && dense_units > 0, ErrorCode::kShape,
          "model extents must be positive");
  require(in_height >= 6 && in_width >= 6, ErrorCode::kShape, "input must be at least 6x6");
  require(conv2_height() % 2 == 0 && conv2_width() % 2 == 0, ErrorCode::kShape,
          "second convolution output must have even extents for 2x2 pooling");
}

Parameters Parameters::zeros(const ModelSpec& s) {
  s.validate();
  return {
      Tensor({s.conv1_filters, s.in_channels, 3, 3}),
      Tensor({s.conv1_filters}),
      Tensor({s.conv2_filters, s.conv1_filters, 3, 3}),
      Tensor({s.conv2_filters}),
      Tensor({s.dense_units, s.flat_size()}),
      Tensor({s.dense_units}),
      Tensor({1, s.dense_units}),
      Tensor({1}),
  };
}

std::array<Tensor*, Parameters::kTensorCount> Parameters::tensors() {
  return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &dense_w, &dense_b, &out_w, &out_b};
}

std::array<const Tensor*, Parameters::kTensorCount> Parameters::tensors() const {
  return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &dense_w, &dense_b, &out_w, &out_b};
}

std::size_t Parameters::count() const {
  std::size_t n = 0;
  for (const Tensor* t : tensors()) n += t->size();
  return n;
}

Model::Model(const ModelSpec& spec) : spec_(spec), params_(Parameters::zeros(spec)) {}

Model Model::initialized(const ModelSpec& spec, std::uint64_t seed) {
  Model model(spec);
  Rng rng(seed);
  auto glorot = [&](Tensor& w, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (float& x : w.data()) x = static_cast<float>(dist(rng));
  };
  Parameters& p = model.params_;
  glorot(p.conv1_w, 9.0 * spec.in_channels, 9.0 * spec.conv1_filters);
  glorot(p.conv2_w, 9.0 * spec.conv1_filters, 9.0 * spec.conv2_filters);
  glorot(p.dense_w, static_cast<double>(spec.flat_size()), static_cast<double>(spec.dense_units));
  glorot(p.out_w, static_cast<double>(spec.dense_units), 1.0);
  return model;
}

// ---------------------------------------------------------------- raw kernels

namespace {

constexpr std::size_t kLanes = 16;
constexpr float kProbFloor = 1e-7F;

// Fixed-order lane reduction so results never depend on vector width.
float dot(const float* a, const float* b, std::size_t n) {
  float acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += a[i + l] * b[i + l];
  }
  for (std::size_t l = 0; i < n; ++i, ++l) acc[l] += a[i] * b[i];
  float s = 0.0F;
  for (float v : acc) s += v;
  return s;
}

float sum(const float* a, std::size_t n) {
  float acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += a[i + l];
  }
  for (std::size_t l = 0; i < n; ++i, ++l) acc[l] += a[i];
  float s = 0.0F;
  for (float v : acc) s += v;
  return s;
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// out (K x (H-2) x (W-2)) = bias + valid 3x3 cross-correlation of in (C x H x W).
void conv3x3_forward(const float* in, std::size_t C, std::size_t H, std::size_t W, const float* kernels,
                     const float* bias, std::size_t K, float* out) {
  const std::size_t Ho = H - 2;
  const std::size_t Wo = W - 2;
  for (std::size_t k = 0; k < K; ++k) {
    float* o = out + k * Ho * Wo;
    std::fill(o, o + Ho * Wo, bias ? bias[k] : 0.0F);
    for (std::size_t c = 0; c < C; ++c) {
      const float* ip = in + c * H * W;
      const float* w = kernels + (k * C + c) * 9;
      const float w0 = w[0], w1 = w[1], w2 = w[2], w3 = w[3], w4 = w[4], w5 = w[5], w6 = w[6], w7 = w[7], w8 = w[8];
      for (std::size_t i = 0; i < Ho; ++i) {
        float* __restrict orow = o + i * Wo;
        const float* __restrict r0 = ip + i * W;
        const float* __restrict r1 = r0 + W;
        const float* __restrict r2 = r1 + W;
        for (std::size_t j = 0; j < Wo; ++j) {
          orow[j] += w0 * r0[j] + w1 * r0[j + 1] + w2 * r0[j + 2] + w3 * r1[j] + w4 * r1[j + 1] + w5 * r1[j + 2] +
                     w6 * r2[j] + w7 * r2[j + 1] + w8 * r2[j + 2];
        }
      }
    }
  }
}

// dk[k,c,u,v] += sum_ij dout[k,i,j] * in[c,i+u,j+v]; db[k] += sum_ij dout[k,i,j].
void conv3x3_backward_weights(const float* in, std::size_t C, std::size_t H, std::size_t W, const float* dout,
                              std::size_t K, float* dk, float* db) {
  const std::size_t Ho = H - 2;
  const std::size_t Wo = W - 2;
  for (std::size_t k = 0; k < K; ++k) {
    const float* g = dout + k * Ho * Wo;
    db[k] += sum(g, Ho * Wo);
    for (std::size_t c = 0; c < C; ++c) {
      const float* ip = in + c * H * W;
      float acc[9][kLanes] = {};
      for (std::size_t i = 0; i < Ho; ++i) {
        const float* grow = g + i * Wo;
        const float* rows[3] = {ip + i * W, ip + (i + 1) * W, ip + (i + 2) * W};
        std::size_t j = 0;
        for (; j + kLanes <= Wo; j += kLanes) {
          for (int u = 0; u < 3; ++u) {
            for (int v = 0; v < 3; ++v) {
              const float* r = rows[u] + j + v;
              float* a = acc[u * 3 + v];
              for (std::size_t l = 0; l < kLanes; ++l) a[l] += grow[j + l] * r[l];
            }
          }
        }
        for (std::size_t l = 0; j < Wo; ++j, ++l) {
          for (int u = 0; u < 3; ++u) {
            for (int v = 0; v < 3; ++v) acc[u * 3 + v][l] += grow[j] * rows[u][j + v];
          }
        }
      }
      float* w = dk + (k * C + c) * 9;
      for (int t = 0; t < 9; ++t) {
        float s = 0.0F;
        for (float x : acc[t]) s += x;
        w[t] += s;
      }
    }
  }
}

// din (C x H x W) += full correlation of dout with the flipped kernels,
// computed as a valid correlation over dout zero-padded by 2.
void conv3x3_backward_input(const float* kernels, std::size_t C, std::size_t H, std::size_t W, const float* dout,
                            std::size_t K, float* din, std::vector<float>& scratch) {
  const std::size_t Ho = H - 2;
  const std::size_t Wo = W - 2;
  const std::size_t Hp = H + 2;
  const std::size_t Wp = W + 2;
  scratch.assign(K * Hp * Wp, 0.0F);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < Ho; ++i) {
      std::copy_n(dout + (k * Ho + i) * Wo, Wo, scratch.data() + (k * Hp + i + 2) * Wp + 2);
    }
  }
  for (std::size_t c = 0; c < C; ++c) {
    float* d = din + c * H * W;
    for (std::size_t k = 0; k < K; ++k) {
      const float* gp = scratch.data() + k * Hp * Wp;
      const float* w = kernels + (k * C + c) * 9;
      // flipped taps
      const float f0 = w[8], f1 = w[7], f2 = w[6], f3 = w[5], f4 = w[4], f5 = w[3], f6 = w[2], f7 = w[1], f8 = w[0];
      for (std::size_t y = 0; y < H; ++y) {
        float* __restrict drow = d + y * W;
        const float* __restrict r0 = gp + y * Wp;
        const float* __restrict r1 = r0 + Wp;
        const float* __restrict r2 = r1 + Wp;
        for (std::size_t x = 0; x < W; ++x) {
          drow[x] += f0 * r0[x] + f1 * r0[x + 1] + f2 * r0[x + 2] + f3 * r1[x] + f4 * r1[x + 1] + f5 * r1[x + 2] +
                     f6 * r2[x] + f7 * r2[x + 1] + f8 * r2[x + 2];
        }
      }
    }
  }
}

void relu_inplace(float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > 0.0F ? x[i] : 0.0F;
}

// Zeroes gradient entries whose forward activation was clipped by ReLU.
void relu_mask(const float* activation, float* grad, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) grad[i] = activation[i] > 0.0F ? grad[i] : 0.0F;
}

void maxpool2_raw(const float* in, std::size_t K, std::size_t H, std::size_t W, float* out, std::uint32_t* argmax) {
  const std::size_t Ho = H / 2;
  const std::size_t Wo = W / 2;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < Ho; ++i) {
      for (std::size_t j = 0; j < Wo; ++j) {
        const std::size_t base = (k * H + 2 * i) * W + 2 * j;
        const std::size_t cand[4] = {base, base + 1, base + W, base + W + 1};
        std::size_t best = cand[0];
        for (int t = 1; t < 4; ++t) {
          if (in[cand[t]] > in[best]) best = cand[t];
        }
        const std::size_t o = (k * Ho + i) * Wo + j;
        out[o] = in[best];
        argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
}

float logistic(float z) {
  const double p = 1.0 / (1.0 + std::exp(-static_cast<double>(z)));
  return std::clamp(static_cast<float>(p), kProbFloor, 1.0F - kProbFloor);
}

void require_shape(const Tensor& t, const std::vector<std::size_t>& shape, const char* what) {
  if (t.shape() != shape) {
    Tensor expected(shape);
    fail(ErrorCode::kShape,
         std::string(what) + " has shape " + t.shape_string() + ", expected " + expected.shape_string());
  }
}

}  // namespace

// ---------------------------------------------------------------- layers

Tensor conv2d_valid(const Tensor& input, const Tensor& kernels, const Tensor& bias) {
  require(input.rank() == 3, ErrorCode::kShape, "conv2d_valid expects C x H x W input");
  require(kernels.rank() == 4 && kernels.dim(2) == 3 && kernels.dim(3) == 3, ErrorCode::kShape,
          "conv2d_valid expects K x C x 3 x 3 kernels");
  const std::size_t C = input.dim(0), H = input.dim(1), W = input.dim(2), K = kernels.dim(0);
  require(kernels.dim(1) == C, ErrorCode::kShape, "kernel channels do not match input channels");
  require(bias.rank() == 1 && bias.dim(0) == K, ErrorCode::kShape, "bias length must equal filter count");
  require(H >= 3 && W >= 3, ErrorCode::kShape, "input smaller than the 3x3 kernel");
  Tensor out({K, H - 2, W - 2});
  conv3x3_forward(input.raw(), C, H, W, kernels.raw(), bias.raw(), K, out.raw());
  return out;
}

std::pair<Tensor, std::vector<std::uint32_t>> maxpool2(const Tensor& input) {
  require(input.rank() == 3, ErrorCode::kShape, "maxpool2 expects K x H x W input");
  const std::size_t K = input.dim(0), H = input.dim(1), W = input.dim(2);
  require(H % 2 == 0 && W % 2 == 0, ErrorCode::kShape, "maxpool2 needs even spatial extents");
  Tensor out({K, H / 2, W / 2});
  std::vector<std::uint32_t> argmax(out.size());
  maxpool2_raw(input.raw(), K, H, W, out.raw(), argmax.data());
  return {std::move(out), std::move(argmax)};
}

Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  require(weights.rank() == 2, ErrorCode::kShape, "dense weights must be O x N");
  const std::size_t O = weights.dim(0), N = weights.dim(1);
  require(input.size() == N, ErrorCode::kShape, "dense input length does not match weights");
  require(bias.rank() == 1 && bias.dim(0) == O, ErrorCode::kShape, "dense bias length mismatch");
  Tensor out({O});
  for (std::size_t o = 0; o < O; ++o) out[o] = bias[o] + dot(weights.raw() + o * N, input.raw(), N);
  return out;
}

// ---------------------------------------------------------------- forward

std::pair<Tensor, ForwardCache> forward(const Model& model, const Tensor& batch) {
  const ModelSpec& s = model.spec();
  require(batch.rank() == 4 && batch.dim(1) == s.in_channels && batch.dim(2) == s.in_height &&
              batch.dim(3) == s.in_width,
          ErrorCode::kShape,
          "batch shape " + batch.shape_string() + " does not match model input " + std::to_string(s.in_channels) +
              "x" + std::to_string(s.in_height) + "x" + std::to_string(s.in_width));
  const Parameters& p = model.params();
  const std::size_t B = batch.dim(0);

  ForwardCache cache;
  cache.model = &model;
  cache.model_version = model.version();
  cache.batch = B;
  cache.input = batch;
  cache.conv1 = Tensor({B, s.conv1_filters, s.conv1_height(), s.conv1_width()});
  cache.conv2 = Tensor({B, s.conv2_filters, s.conv2_height(), s.conv2_width()});
  cache.pooled = Tensor({B, s.conv2_filters, s.pooled_height(), s.pooled_width()});
  cache.argmax.assign(cache.pooled.size(), 0);
  cache.hidden = Tensor({B, s.dense_units});
  cache.probs = Tensor({B, 1});

  const std::size_t pooled_n = s.flat_size();
  for (std::size_t b = 0; b < B; ++b) {
    float* c1 = cache.conv1.outer(b).data();
    float* c2 = cache.conv2.outer(b).data();
    conv3x3_forward(batch.outer(b).data(), s.in_channels, s.in_height, s.in_width, p.conv1_w.raw(), p.conv1_b.raw(),
                    s.conv1_filters, c1);
    relu_inplace(c1, cache.conv1.outer(b).size());
    conv3x3_forward(c1, s.conv1_filters, s.conv1_height(), s.conv1_width(), p.conv2_w.raw(), p.conv2_b.raw(),
                    s.conv2_filters, c2);
    relu_inplace(c2, cache.conv2.outer(b).size());
    maxpool2_raw(c2, s.conv2_filters, s.conv2_height(), s.conv2_width(), cache.pooled.outer(b).data(),
                 cache.argmax.data() + b * pooled_n);
  }

  // Dense layers iterate weights in the outer loop so each row is reused across the batch.
  const std::size_t D = s.dense_units;
  for (std::size_t o = 0; o < D; ++o) {
    const float* w = p.dense_w.raw() + o * pooled_n;
    for (std::size_t b = 0; b < B; ++b) {
      const float z = p.dense_b[o] + dot(w, cache.pooled.outer(b).data(), pooled_n);
      cache.hidden.raw()[b * D + o] = z > 0.0F ? z : 0.0F;
    }
  }
  for (std::size_t b = 0; b < B; ++b) {
    const float z = p.out_b[0] + dot(p.out_w.raw(), cache.hidden.raw() + b * D, D);
    cache.probs[b] = logistic(z);
  }
  Tensor probs = cache.probs;
  return {std::move(probs), std::move(cache)};
}

float predict(const Model& model, std::span<const float> image) {
  const ModelSpec& s = model.spec();
  require(image.size() == s.in_channels * s.in_height * s.in_width, ErrorCode::kShape,
          "image size does not match model input");
  Tensor batch({1, s.in_channels, s.in_height, s.in_width}, std::vector<float>(image.begin(), image.end()));
  return forward(model, batch).first[0];
}

BceResult bce_loss(const Tensor& probs, const Tensor& labels) {
  require(probs.size() == labels.size() && probs.size() > 0, ErrorCode::kShape,
          "probabilities and labels must have the same non-zero length");
  BceResult r;
  r.grad = Tensor(probs.shape());
  const double B = static_cast<double>(probs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = std::clamp(static_cast<double>(probs[i]), 1e-7, 1.0 - 1e-7);
    const double y = labels[i];
    total += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    r.grad[i] = static_cast<float>((-(y / p) + (1.0 - y) / (1.0 - p)) / B);
  }
  r.loss = total / B;
  return r;
}

// ---------------------------------------------------------------- backward

Parameters backward(const Model& model, const ForwardCache& cache, const Tensor& dprob) {
  require(cache.model == &model && cache.model_version == model.version(), ErrorCode::kContract,
          "forward cache is stale: the model changed since it was computed");
  const ModelSpec& s = model.spec();
  const Parameters& p = model.params();
  const std::size_t B = cache.batch;
  require(dprob.size() == B, ErrorCode::kShape, "dL/dp length does not match the cached batch");

  Parameters g = Parameters::zeros(s);
  const std::size_t D = s.dense_units;
  const std::size_t F = s.flat_size();

  // Output neuron: dL/dz = dL/dp * p (1 - p).
  std::vector<float> dz_out(B);
  for (std::size_t b = 0; b < B; ++b) {
    const float pb = cache.probs[b];
    dz_out[b] = dprob[b] * pb * (1.0F - pb);
    g.out_b[0] += dz_out[b];
    axpy(dz_out[b], cache.hidden.raw() + b * D, g.out_w.raw(), D);
  }

  // Hidden layer pre-activation gradients.
  std::vector<float> dh(B * D);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t o = 0; o < D; ++o) {
      dh[b * D + o] = cache.hidden.raw()[b * D + o] > 0.0F ? dz_out[b] * p.out_w[o] : 0.0F;
    }
  }

  Tensor dpooled({B, F});
  for (std::size_t o = 0; o < D; ++o) {
    const float* w = p.dense_w.raw() + o * F;
    float* gw = g.dense_w.raw() + o * F;
    for (std::size_t b = 0; b < B; ++b) {
      const float d = dh[b * D + o];
      if (d == 0.0F) continue;
      g.dense_b[o] += d;
      axpy(d, cache.pooled.outer(b).data(), gw, F);
      axpy(d, w, dpooled.outer(b).data(), F);
    }
  }

  const std::size_t c1_n = s.conv1_filters * s.conv1_height() * s.conv1_width();
  const std::size_t c2_n = s.conv2_filters * s.conv2_height() * s.conv2_width();
  std::vector<float> dc2(c2_n);
  std::vector<float> dc1(c1_n);
  std::vector<float> scratch;
  for (std::size_t b = 0; b < B; ++b) {
    // Max-pool routes each gradient to its recorded winner.
    std::fill(dc2.begin(), dc2.end(), 0.0F);
    const float* dp = dpooled.outer(b).data();
    const std::uint32_t* am = cache.argmax.data() + b * F;
    for (std::size_t i = 0; i < F; ++i) dc2[am[i]] += dp[i];
    const float* a2 = cache.conv2.outer(b).data();
    relu_mask(a2, dc2.data(), c2_n);

    const float* a1 = cache.conv1.outer(b).data();
    conv3x3_backward_weights(a1, s.conv1_filters, s.conv1_height(), s.conv1_width(), dc2.data(), s.conv2_filters,
                             g.conv2_w.raw(), g.conv2_b.raw());
    std::fill(dc1.begin(), dc1.end(), 0.0F);
    conv3x3_backward_input(p.conv2_w.raw(), s.conv1_filters, s.conv1_height(), s.conv1_width(), dc2.data(),
                           s.conv2_filters, dc1.data(), scratch);
    relu_mask(a1, dc1.data(), c1_n);
    conv3x3_backward_weights(cache.input.outer(b).data(), s.in_channels, s.in_height, s.in_width, dc1.data(),
                             s.conv1_filters, g.conv1_w.raw(), g.conv1_b.raw());
  }
  return g;
}

// ---------------------------------------------------------------- Adam

AdamState AdamState::for_spec(const ModelSpec& spec, AdamHyper hyper) {
  return {hyper, 0, Parameters::zeros(spec), Parameters::zeros(spec)};
}

void adam_step(Parameters& params, const Parameters& grads, AdamState& state) {
  auto pt = params.tensors();
  auto gt = grads.tensors();
  auto mt = state.m.tensors();
  auto vt = state.v.tensors();
  for (std::size_t i = 0; i < Parameters::kTensorCount; ++i) {
    require(pt[i]->shape() == gt[i]->shape() && pt[i]->shape() == mt[i]->shape(), ErrorCode::kShape,
            "Adam: parameter, gradient and moment shapes differ");
  }
  const AdamHyper& h = state.hyper;
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(h.beta1, t);
  const double c2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < Parameters::kTensorCount; ++i) {
    float* w = pt[i]->raw();
    const float* g = gt[i]->raw();
    float* m = mt[i]->raw();
    float* v = vt[i]->raw();
    for (std::size_t j = 0; j < pt[i]->size(); ++j) {
      const double gj = g[j];
      const double mj = h.beta1 * m[j] + (1.0 - h.beta1) * gj;
      const double vj = h.beta2 * v[j] + (1.0 - h.beta2) * gj * gj;
      m[j] = static_cast<float>(mj);
      v[j] = static_cast<float>(vj);
      const double m_hat = mj / c1;
      const double v_hat = vj / c2;
      w[j] = static_cast<float>(w[j] - h.lr * m_hat / (std::sqrt(v_hat) + h.eps));
    }
  }
}

void adam_step(Model& model, const Parameters& grads, AdamState& state) {
  adam_step(model.mutable_params(), grads, state);
}

// ---------------------------------------------------------------- weight files

namespace {

constexpr char kMagic[4] = {'S', '2', 'C', 'W'};
constexpr std::uint16_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little, "weight I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    require(pos_ + sizeof(T) <= bytes_.size(), ErrorCode::kFormat, "weight file truncated");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  void read_floats(float* dst, std::size_t n) {
    require(pos_ + n * sizeof(float) <= bytes_.size(), ErrorCode::kFormat, "weight file truncated");
    std::memcpy(dst, bytes_.data() + pos_, n * sizeof(float));
    pos_ += n * sizeof(float);
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t weight_file_size(const ModelSpec& spec) {
  const Parameters p = Parameters::zeros(spec);
  std::size_t n = sizeof(kMagic) + 2 * sizeof(std::uint16_t);
  for (const Tensor* t : p.tensors()) n += 1 + 4 * t->rank() + 4 * t->size();
  return n;
}

void save_weights(const Model& model, const std::filesystem::path& path) {
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint16_t>(out, kFormatVersion);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(Parameters::kTensorCount));
  for (const Tensor* t : model.params().tensors()) {
    put<std::uint8_t>(out, static_cast<std::uint8_t>(t->rank()));
    for (std::size_t e : t->shape()) put<std::uint32_t>(out, static_cast<std::uint32_t>(e));
    out.append(reinterpret_cast<const char*>(t->raw()), t->size() * sizeof(float));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), ErrorCode::kIo, "cannot write weights: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  require(static_cast<bool>(f), ErrorCode::kIo, "write failed: " + path.string());
}

Model load_weights(const std::filesystem::path& path, const ModelSpec& expected) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::kIo, "cannot read weights: " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader r(bytes);
  char magic[4];
  for (char& c : magic) c = r.get<char>();
  require(std::equal(magic, magic + 4, kMagic), ErrorCode::kFormat, "bad magic: not an S2CW weight file");
  require(r.get<std::uint16_t>() == kFormatVersion, ErrorCode::kFormat, "unsupported weight file version");
  require(r.get<std::uint16_t>() == Parameters::kTensorCount, ErrorCode::kFormat, "unexpected tensor count");

  // Load into a scratch parameter set; the model is only built once everything checks out.
  Parameters loaded = Parameters::zeros(expected);
  for (Tensor* t : loaded.tensors()) {
    const std::size_t rank = r.get<std::uint8_t>();
    std::vector<std::size_t> shape(rank);
    for (std::size_t& e : shape) e = r.get<std::uint32_t>();
    require(shape == t->shape(), ErrorCode::kFormat, "tensor shape does not match the expected model");
    r.read_floats(t->raw(), t->size());
  }
  require(r.at_end(), ErrorCode::kFormat, "trailing bytes after the last tensor");
  Model model(expected);
  model.mutable_params() = std::move(loaded);
  return model;
}

}  // namespace s2c::cnn
