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
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "s2c/channel.hpp"
#include "s2c/error.hpp"
#include "test_util.hpp"

using namespace s2c;
using namespace s2c::channel;

namespace {

FrameImage random_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<float> u(0.0F, 1.0F);
  FrameImage img(w, h);
  for (float& p : img.pixels()) p = u(rng);
  return img;
}

// Hand-built schedule on a round time grid: t_b = t_0 = 0.
TxSchedule manual_schedule(std::vector<FrameImage> frames, double frame_duration) {
  TxSchedule s;
  s.frame_duration = frame_duration;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    s.entries.push_back({std::move(frames[k]), codec::FrameKind::kDataQr1, static_cast<double>(k) * frame_duration,
                         frame_duration, static_cast<int>(k)});
  }
  return s;
}

std::vector<codec::FramePayload> random_payloads(std::size_t n, std::uint64_t seed) {
  std::vector<codec::FramePayload> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({test::random_bits(433, seed + i), codec::FrameKind::kDataQr1});
  return out;
}

// Direct 2D Gaussian blur with clamped edges, used as an oracle for the
// separable implementation.
FrameImage naive_blur(const FrameImage& img, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double ksum = 0.0;
  for (int i = -r; i <= r; ++i) ksum += k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
  FrameImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          const int sx = std::clamp(x + dx, 0, img.width() - 1);
          const int sy = std::clamp(y + dy, 0, img.height() - 1);
          acc += k[dx + r] * k[dy + r] * img.at(sx, sy);
        }
      }
      out.at(x, y) = static_cast<float>(acc / (ksum * ksum));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("identity channel leaves the image untouched") {
  const FrameImage img = random_image(40, 30, 1);
  CHECK(distort(img, ChannelParams::identity(), 123) == img);
}

TEST_CASE("a full turn returns the input within bilinear tolerance") {
  const FrameImage img = random_image(32, 32, 2);
  CHECK(max_abs_diff(rotate_bilinear(img, 360.0), img) < 1e-6);
  ChannelParams p = ChannelParams::identity();
  p.rotation_deg = {360.0, 360.0};
  CHECK(max_abs_diff(distort(img, p, 9), img) < 1e-6);
}

TEST_CASE("quarter turn maps pixels exactly on a square grid") {
  const FrameImage img = random_image(9, 9, 3);
  const FrameImage rot = rotate_bilinear(rotate_bilinear(rotate_bilinear(rotate_bilinear(img, 90), 90), 90), 90);
  CHECK(max_abs_diff(rot, img) < 1e-5);
  // The centre pixel is a fixed point of every rotation.
  CHECK(rotate_bilinear(img, 37.0).at(4, 4) == doctest::Approx(img.at(4, 4)).epsilon(1e-6));
}

TEST_CASE("rotation fills uncovered corners with white") {
  const FrameImage black(20, 20, 0.0F);
  const FrameImage rot = rotate_bilinear(black, 45.0);
  CHECK(rot.at(0, 0) == doctest::Approx(1.0));
  CHECK(rot.at(10, 10) == doctest::Approx(0.0));
}

TEST_CASE("full-frame crop is the identity and partial crop magnifies") {
  const FrameImage img = random_image(24, 24, 4);
  CHECK(max_abs_diff(crop_resize(img, 1.0, 0.0, 0.0), img) < 1e-6);
  // Half crop at the origin against a direct bilinear oracle.
  const FrameImage half = crop_resize(img, 0.5, 0.0, 0.0);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 24; ++x) {
      const double sx = std::clamp((x + 0.5) * 0.5 - 0.5, 0.0, 23.0);
      const double sy = std::clamp((y + 0.5) * 0.5 - 0.5, 0.0, 23.0);
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const int x1 = std::min(x0 + 1, 23);
      const int y1 = std::min(y0 + 1, 23);
      const double fx = sx - x0;
      const double fy = sy - y0;
      const double v = (1 - fy) * ((1 - fx) * img.at(x0, y0) + fx * img.at(x1, y0)) +
                       fy * ((1 - fx) * img.at(x0, y1) + fx * img.at(x1, y1));
      CHECK(half.at(x, y) == doctest::Approx(v).epsilon(1e-5));
    }
  }
}

TEST_CASE("separable blur matches the direct 2D convolution") {
  const FrameImage img = random_image(21, 17, 5);
  for (double sigma : {0.4, 0.8, 1.2, 2.0}) {
    CHECK(max_abs_diff(gaussian_blur(img, sigma), naive_blur(img, sigma)) < 1e-5);
  }
  // A constant image is preserved (normalised kernel, clamped edges).
  const FrameImage grey(15, 15, 0.3F);
  CHECK(max_abs_diff(gaussian_blur(grey, 1.1), grey) < 1e-6);
}

TEST_CASE("distortion is deterministic per seed and always within [0, 1]") {
  const FrameImage img = codec::base_frame(codec::FrameKind::kDataQr1, codec::CodecConfig{});
  ChannelParams p;
  p.rotation_deg = {-15, 15};
  p.crop_fraction = {0.8, 1.0};
  p.blur_sigma = {0, 1.2};
  p.brightness_delta = {-0.3, 0.3};
  p.noise_sigma = 0.2;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const FrameImage a = distort(img, p, seed);
    CHECK(a == distort(img, p, seed));
    for (float v : a.pixels()) {
      CHECK(v >= 0.0F);
      CHECK(v <= 1.0F);
    }
  }
  CHECK(distort(img, p, 1) != distort(img, p, 2));
}

TEST_CASE("invalid channel parameters are rejected") {
  ChannelParams p;
  p.noise_sigma = -0.1;
  CHECK_THROWS_AS(p.validate(), Error);
  p = ChannelParams{};
  p.crop_fraction = {0.0, 1.0};
  CHECK_THROWS_AS(p.validate(), Error);
  p = ChannelParams{};
  p.crop_fraction = {0.5, 1.1};
  CHECK_THROWS_AS(p.validate(), Error);
  p = ChannelParams{};
  p.oversampling = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  LinkConfig l;
  l.cam_fps = 0;
  CHECK_THROWS_AS(l.validate(), Error);
}

TEST_CASE("exposure inside one frame gives an unblended capture") {
  const FrameImage a = random_image(8, 8, 6);
  const FrameImage b = random_image(8, 8, 7);
  const TxSchedule s = manual_schedule({a, b}, 1.0);
  ChannelParams p = ChannelParams::identity();
  p.exposure_s = 0.25;
  const CapturedFrame c = sample_rx(s, p, 1, 4.0);  // window [0.25, 0.5]
  CHECK(c.blend_alpha == 1.0);
  CHECK(c.tx_index_truth == 0);
  CHECK(c.image == a);
  CHECK(c.capture_time_s == 0.25);
}

TEST_CASE("exposure centred on a boundary blends half and half") {
  const FrameImage a = random_image(8, 8, 8);
  const FrameImage b = random_image(8, 8, 9);
  const TxSchedule s = manual_schedule({a, b}, 1.0);
  ChannelParams p = ChannelParams::identity();
  p.exposure_s = 0.5;
  const CapturedFrame c = sample_rx(s, p, 3, 4.0);  // window [0.75, 1.25]
  CHECK(c.blend_alpha == doctest::Approx(0.5));
  for (std::size_t i = 0; i < c.image.size(); ++i) {
    CHECK(c.image.pixels()[i] == doctest::Approx(0.5 * a.pixels()[i] + 0.5 * b.pixels()[i]).epsilon(1e-6));
  }
}

TEST_CASE("blend weights partition the exposure window") {
  const FrameImage a(8, 8, 0.0F);
  const FrameImage b(8, 8, 1.0F);
  const TxSchedule s = manual_schedule({a, b}, 1.0);
  ChannelParams p = ChannelParams::identity();
  p.exposure_s = 0.3;
  for (int n = 0; n < 17; ++n) {  // windows [n/10, n/10 + 0.3]
    const CapturedFrame c = sample_rx(s, p, n, 10.0);
    CHECK(c.blend_alpha >= 0.5);
    CHECK(c.blend_alpha <= 1.0);
    // Pixel value is the weight of frame b; the weights sum to one.
    const double wb = c.image.at(0, 0);
    const double expected_wb = std::clamp((n / 10.0 + 0.3 - 1.0) / 0.3, 0.0, 1.0);
    CHECK(wb == doctest::Approx(expected_wb).epsilon(1e-5));
    CHECK(c.blend_alpha == doctest::Approx(std::max(wb, 1.0 - wb)).epsilon(1e-5));
  }
}

TEST_CASE("samples outside the stream are rejected") {
  const TxSchedule s = manual_schedule({random_image(4, 4, 1)}, 1.0);
  ChannelParams p = ChannelParams::identity();
  p.exposure_s = 0.0;
  try {
    (void)sample_rx(s, p, 70, 60.0);
    FAIL("expected out-of-stream error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOutOfStream);
  }
  CHECK_THROWS_AS((void)sample_rx(s, p, -1, 60.0), Error);
}

TEST_CASE("capture timing follows n over the camera rate") {
  CHECK(capture_time(30, 60.0) == 0.5);
  CHECK(capture_time(30, 60.0, 2) == 0.25);
  const TxSchedule s = manual_schedule({random_image(4, 4, 1)}, 1.0);
  ChannelParams p = ChannelParams::identity();
  p.exposure_s = 0.0;
  p.oversampling = 3;
  const auto caps = capture_stream(s, p, 10.0);
  REQUIRE(caps.size() == 31);  // closed window [0, 1] at 30 samples per second
  for (std::size_t i = 1; i < caps.size(); ++i) CHECK(caps[i].capture_time_s > caps[i - 1].capture_time_s);
}

TEST_CASE("one-second frame at 60 fps gives 60 captures of that frame") {
  LinkConfig cfg;
  cfg.tx_data_fps = 1.0;
  const TxSchedule s = build_schedule(random_payloads(1, 1), cfg, codec::CodecConfig{}, 17);
  TxSchedule single = s;
  single.entries.resize(1);
  ChannelParams p = ChannelParams::identity();
  p.exposure_s = 0.0;
  const auto caps = capture_stream(single, p, 60.0);
  CHECK(caps.size() == 60);
  for (const auto& c : caps) CHECK(c.tx_index_truth == 0);
}

TEST_CASE("Tx faster than the camera skips frames") {
  LinkConfig cfg;
  cfg.tx_data_fps = 120.0;
  const TxSchedule s = build_schedule(random_payloads(40, 2), cfg, codec::CodecConfig{}, 3);
  ChannelParams p = ChannelParams::identity();
  p.exposure_s = 0.0;
  std::set<int> seen;
  for (const auto& c : capture_stream(s, p, 60.0)) seen.insert(c.tx_index_truth);
  CHECK(seen.size() < s.entries.size());
  CHECK(seen.size() >= s.entries.size() / 2 - 1);
}

TEST_CASE("every Tx frame appears in exactly F times cam_fps captures") {
  const LinkConfig cfg;  // F = 4/3 s at 60 fps: 80 ticks per frame
  ChannelParams p = ChannelParams::identity();
  p.exposure_s = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TxSchedule s = build_schedule(random_payloads(10, seed), cfg, codec::CodecConfig{}, seed);
    REQUIRE(s.entries.size() == 11);
    std::map<int, int> counts;
    for (const auto& c : capture_stream(s, p, cfg.cam_fps)) ++counts[c.tx_index_truth];
    REQUIRE(counts.size() == 11);
    for (const auto& [k, n] : counts) CHECK(n == 80);
  }
}

TEST_CASE("build_schedule inserts an overhead before each group of P data frames") {
  const LinkConfig cfg;
  const codec::CodecConfig codec;
  SUBCASE("20 payloads with P = 10 gives 22 entries") {
    const TxSchedule s = build_schedule(random_payloads(20, 1), cfg, codec, 4);
    REQUIRE(s.entries.size() == 22);
    for (std::size_t k = 0; k < 22; ++k) {
      const bool overhead = k == 0 || k == 11;
      CHECK((s.entries[k].kind == codec::FrameKind::kOverhead) == overhead);
      CHECK(s.entries[k].start_s == s.t_b + static_cast<double>(k) * s.frame_duration);
      CHECK(s.entries[k].duration_s == s.frame_duration);
    }
    CHECK(s.entries[0].image == codec::make_overhead_frame(codec));
    CHECK(s.data_frame_count() == 20);
    CHECK(s.frame_duration == doctest::Approx(4.0 / 3.0));
  }
  SUBCASE("one payload gives O, d") {
    const TxSchedule s = build_schedule(random_payloads(1, 1), cfg, codec, 5);
    REQUIRE(s.entries.size() == 2);
    CHECK(s.entries[0].kind == codec::FrameKind::kOverhead);
    CHECK(s.entries[1].data_index == 0);
  }
  SUBCASE("arrival offset lies in [0, F) and depends on the seed") {
    std::set<double> offsets;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const TxSchedule s = build_schedule(random_payloads(1, 1), cfg, codec, seed);
      CHECK(s.t_0 >= 0.0);
      CHECK(s.t_0 < s.frame_duration);
      offsets.insert(s.t_0);
    }
    CHECK(offsets.size() == 50);
  }
  SUBCASE("empty payload list is rejected") {
    CHECK_THROWS_AS((void)build_schedule({}, cfg, codec, 1), Error);
  }
}

TEST_CASE("default link captures every one of 11 entries") {
  const LinkConfig cfg;
  const TxSchedule s = build_schedule(random_payloads(10, 9), cfg, codec::CodecConfig{}, 10);
  std::set<int> seen;
  for (const auto& c : capture_stream(s, ChannelParams{}, cfg.cam_fps)) seen.insert(c.tx_index_truth);
  CHECK(seen.size() == 11);
}

TEST_CASE("captures are a pure function of schedule, params and index") {
  const LinkConfig cfg;
  const TxSchedule s = build_schedule(random_payloads(2, 3), cfg, codec::CodecConfig{}, 6);
  ChannelParams p;
  p.seed = 99;
  p.blur_sigma = {0.0, 1.0};
  const auto all = capture_stream(s, p, cfg.cam_fps);
  // Out-of-order, individually requested samples match the sequential stream.
  for (std::size_t i = all.size(); i-- > 0;) {
    if (i % 37 != 0) continue;
    const CapturedFrame c = sample_rx(s, p, all[i].sample_index, cfg.cam_fps);
    CHECK(c.image == all[i].image);
    CHECK(c.seed == all[i].seed);
  }
}

TEST_CASE("capture streams persist as PGM files plus a CSV index") {
  const auto dir = test::scratch_dir("capture_io");
  const LinkConfig cfg;
  const TxSchedule s = build_schedule(random_payloads(1, 4), cfg, codec::CodecConfig{}, 7);
  auto caps = capture_stream(s, ChannelParams{}, cfg.cam_fps);
  caps.resize(12);
  write_capture_stream(dir, caps);
  CHECK(std::filesystem::exists(dir / "index.csv"));
  const auto back = read_capture_stream(dir);
  REQUIRE(back.size() == caps.size());
  for (std::size_t i = 0; i < caps.size(); ++i) {
    CHECK(back[i].sample_index == caps[i].sample_index);
    CHECK(back[i].capture_time_s == caps[i].capture_time_s);
    CHECK(back[i].tx_index_truth == caps[i].tx_index_truth);
    CHECK(back[i].kind_truth == caps[i].kind_truth);
    CHECK(back[i].blend_alpha == caps[i].blend_alpha);
    CHECK(back[i].seed == caps[i].seed);
    // 8-bit quantisation
    CHECK(max_abs_diff(back[i].image, caps[i].image) <= 0.5 / 255.0 + 1e-6);
  }
}
