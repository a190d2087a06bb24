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
#include "s2c/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "s2c/error.hpp"
#include "s2c/kv_config.hpp"
#include "s2c/random.hpp"

namespace s2c::channel {

namespace {
constexpr double kTimeEps = 1e-9;
}

void LinkConfig::validate() const {
  require(tx_refresh_hz > 0 && tx_data_fps > 0 && cam_fps > 0, ErrorCode::kConfig, "link rates must be positive");
  require(overhead_period >= 1, ErrorCode::kConfig, "overhead_period must be >= 1");
  require(std::isfinite(start_time_s), ErrorCode::kConfig, "start time must be finite");
}

ChannelParams ChannelParams::identity() {
  ChannelParams p;
  p.noise_sigma = 0.0;
  return p;
}

void ChannelParams::validate() const {
  require(noise_sigma >= 0.0, ErrorCode::kConfig, "noise_sigma must be >= 0");
  require(blur_sigma.lo >= 0.0 && blur_sigma.lo <= blur_sigma.hi, ErrorCode::kConfig, "invalid blur range");
  require(rotation_deg.lo <= rotation_deg.hi, ErrorCode::kConfig, "invalid rotation range");
  require(crop_fraction.lo > 0.0 && crop_fraction.lo <= crop_fraction.hi && crop_fraction.hi <= 1.0,
          ErrorCode::kConfig, "crop fractions must lie in (0, 1]");
  require(brightness_delta.lo <= brightness_delta.hi, ErrorCode::kConfig, "invalid brightness range");
  require(exposure_s >= 0.0, ErrorCode::kConfig, "exposure must be >= 0");
  require(oversampling >= 1, ErrorCode::kConfig, "oversampling must be >= 1");
}

std::size_t TxSchedule::data_frame_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const TxEntry& e) { return e.data_index >= 0; }));
}

// ---------------------------------------------------------------- distortion

namespace {

// Bilinear sample with white outside the raster.
float sample_white(const FrameImage& img, double x, double y) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const double ax = x - fx;
  const double ay = y - fy;
  auto px = [&](int xi, int yi) -> double {
    if (xi < 0 || yi < 0 || xi >= img.width() || yi >= img.height()) return 1.0;
    return img.at(xi, yi);
  };
  const double top = px(x0, y0) * (1 - ax) + px(x0 + 1, y0) * ax;
  const double bottom = px(x0, y0 + 1) * (1 - ax) + px(x0 + 1, y0 + 1) * ax;
  return static_cast<float>(top * (1 - ay) + bottom * ay);
}

// Bilinear sample with edge clamping.
float sample_clamped(const FrameImage& img, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double ax = x - x0;
  const double ay = y - y0;
  const double top = img.at(x0, y0) * (1 - ax) + img.at(x1, y0) * ax;
  const double bottom = img.at(x0, y1) * (1 - ax) + img.at(x1, y1) * ax;
  return static_cast<float>(top * (1 - ay) + bottom * ay);
}

}  // namespace

FrameImage rotate_bilinear(const FrameImage& img, double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const double cx = (img.width() - 1) / 2.0;
  const double cy = (img.height() - 1) / 2.0;
  FrameImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      // inverse map: output pixel pulls from the source rotated by -theta
      out.at(x, y) = sample_white(img, cx + c * dx + s * dy, cy - s * dx + c * dy);
    }
  }
  return out;
}

FrameImage crop_resize(const FrameImage& img, double fraction, double offset_x, double offset_y) {
  const double sx = fraction;
  FrameImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) = sample_clamped(img, offset_x + (x + 0.5) * sx - 0.5, offset_y + (y + 0.5) * sx - 0.5);
    }
  }
  return out;
}

FrameImage gaussian_blur(const FrameImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-(k * k) / (2.0 * sigma * sigma));
    total += kernel[k + radius];
  }
  for (double& w : kernel) w /= total;

  const int w = img.width();
  const int h = img.height();
  FrameImage tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * img.at(std::clamp(x + k, 0, w - 1), y);
      tmp.at(x, y) = static_cast<float>(acc);
    }
  }
  FrameImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * tmp.at(x, std::clamp(y + k, 0, h - 1));
      out.at(x, y) = static_cast<float>(acc);
    }
  }
  return out;
}

FrameImage distort(const FrameImage& img, const ChannelParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  // All draws happen unconditionally so each stage sees the same stream
  // regardless of which other stages are active.
  const double theta = uniform(rng, params.rotation_deg.lo, params.rotation_deg.hi);
  const double fraction = uniform(rng, params.crop_fraction.lo, params.crop_fraction.hi);
  const double ux = uniform(rng, 0.0, 1.0);
  const double uy = uniform(rng, 0.0, 1.0);
  const double sigma = uniform(rng, params.blur_sigma.lo, params.blur_sigma.hi);
  const double delta = uniform(rng, params.brightness_delta.lo, params.brightness_delta.hi);

  FrameImage out = img;
  if (theta != 0.0) out = rotate_bilinear(out, theta);
  if (fraction < 1.0) {
    const double ox = ux * (1.0 - fraction) * out.width();
    const double oy = uy * (1.0 - fraction) * out.height();
    out = crop_resize(out, fraction, ox, oy);
  }
  if (sigma > 0.0) out = gaussian_blur(out, sigma);
  if (delta != 0.0) {
    for (float& p : out.pixels()) p += static_cast<float>(delta);
  }
  out.clamp();
  if (params.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, params.noise_sigma);
    for (float& p : out.pixels()) p = static_cast<float>(p + noise(rng));
    out.clamp();
  }
  return out;
}

// ---------------------------------------------------------------- sampling

double capture_time(std::int64_t n, double cam_fps, int oversampling) {
  return static_cast<double>(n) / (cam_fps * oversampling);
}

CapturedFrame sample_rx(const TxSchedule& schedule, const ChannelParams& params, std::int64_t n, double cam_fps) {
  require(!schedule.entries.empty(), ErrorCode::kOutOfStream, "empty schedule");
  require(cam_fps > 0.0, ErrorCode::kConfig, "cam_fps must be positive");
  const double t = capture_time(n, cam_fps, params.oversampling);
  const double e = params.exposure_s;
  const double begin = schedule.span_begin();
  const double end = schedule.span_end();
  const double F = schedule.frame_duration;
  require(t >= begin - kTimeEps && t + e <= end + kTimeEps, ErrorCode::kOutOfStream,
          "sample " + std::to_string(n) + " at t=" + format_double(t) + " s lies outside the stream");

  const auto last = static_cast<long>(schedule.entries.size()) - 1;
  auto index_at = [&](double time, double bias) {
    return std::clamp(static_cast<long>(std::floor((time - begin) / F + bias)), 0L, last);
  };

  // Rectangular pulse: each entry contributes its overlap with the exposure window.
  std::vector<std::pair<long, double>> weights;
  if (e <= 0.0) {
    weights.emplace_back(index_at(t, kTimeEps), 1.0);
  } else {
    const long k_lo = index_at(t, kTimeEps);
    const long k_hi = index_at(t + e, -kTimeEps);
    double total = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) {
      const double s = begin + static_cast<double>(k) * F;
      const double overlap = std::min(t + e, s + F) - std::max(t, s);
      if (overlap > kTimeEps * e) {
        weights.emplace_back(k, overlap);
        total += overlap;
      }
    }
    if (weights.empty()) weights.emplace_back(k_lo, total = 1.0);
    for (auto& [k, w] : weights) w /= total;
  }

  auto dominant = std::max_element(weights.begin(), weights.end(),
                                   [](const auto& a, const auto& b) { return a.second < b.second; });
  CapturedFrame cap;
  cap.sample_index = n;
  cap.capture_time_s = t;
  cap.tx_index_truth = static_cast<int>(dominant->first);
  cap.kind_truth = schedule.entries[dominant->first].kind;
  cap.blend_alpha = dominant->second;
  cap.seed = derive_seed(params.seed, {static_cast<std::uint64_t>(n)});

  FrameImage mixed;
  if (weights.size() == 1) {
    mixed = schedule.entries[weights.front().first].image;
  } else {
    const FrameImage& ref = schedule.entries[weights.front().first].image;
    mixed = FrameImage(ref.width(), ref.height(), 0.0F);
    for (const auto& [k, w] : weights) {
      auto src = schedule.entries[k].image.pixels();
      auto dst = mixed.pixels();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += static_cast<float>(w) * src[i];
    }
  }
  cap.image = distort(mixed, params, cap.seed);
  return cap;
}

std::vector<CapturedFrame> capture_stream(const TxSchedule& schedule, const ChannelParams& params, double cam_fps) {
  require(!schedule.entries.empty(), ErrorCode::kOutOfStream, "empty schedule");
  const double rate = cam_fps * params.oversampling;
  std::vector<CapturedFrame> out;
  auto n = static_cast<std::int64_t>(std::ceil(schedule.span_begin() * rate - kTimeEps));
  for (; capture_time(n, cam_fps, params.oversampling) + params.exposure_s <= schedule.span_end() + kTimeEps; ++n) {
    out.push_back(sample_rx(schedule, params, n, cam_fps));
  }
  return out;
}

TxSchedule build_schedule(const std::vector<codec::FramePayload>& payloads, const LinkConfig& cfg,
                          const codec::CodecConfig& codec, std::uint64_t seed) {
  cfg.validate();
  require(!payloads.empty(), ErrorCode::kConfig, "schedule needs at least one data payload");
  TxSchedule sched;
  sched.t_b = cfg.start_time_s;
  sched.frame_duration = cfg.frame_duration();
  Rng rng(seed);
  sched.t_0 = std::uniform_real_distribution<double>(0.0, sched.frame_duration)(rng);

  const FrameImage overhead = codec::make_overhead_frame(codec);
  auto push = [&](FrameImage img, codec::FrameKind kind, int data_index) {
    const double start = sched.t_b + static_cast<double>(sched.entries.size()) * sched.frame_duration;
    sched.entries.push_back({std::move(img), kind, start, sched.frame_duration, data_index});
  };
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    if (i % static_cast<std::size_t>(cfg.overhead_period) == 0) push(overhead, codec::FrameKind::kOverhead, -1);
    push(codec::encode_frame(payloads[i], codec), payloads[i].kind, static_cast<int>(i));
  }
  return sched;
}

// ---------------------------------------------------------------- persistence

namespace {

std::string capture_file_name(std::int64_t n) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "capture_%06lld.pgm", static_cast<long long>(n));
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  return fields;
}

}  // namespace

void write_capture_stream(const std::filesystem::path& dir, const std::vector<CapturedFrame>& captures) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorCode::kIo, "cannot create directory: " + dir.string());
  std::ofstream index(dir / "index.csv", std::ios::trunc);
  require(static_cast<bool>(index), ErrorCode::kIo, "cannot write " + (dir / "index.csv").string());
  index << "sample_index,capture_time_s,tx_index_truth,kind_truth,blend_alpha,seed\n";
  for (const auto& c : captures) {
    write_pgm(dir / capture_file_name(c.sample_index), c.image);
    index << c.sample_index << ',' << format_double(c.capture_time_s) << ',' << c.tx_index_truth << ','
          << codec::name(c.kind_truth) << ',' << format_double(c.blend_alpha) << ',' << c.seed << '\n';
  }
}

std::vector<CapturedFrame> read_capture_stream(const std::filesystem::path& dir) {
  std::ifstream index(dir / "index.csv");
  require(static_cast<bool>(index), ErrorCode::kIo, "cannot read " + (dir / "index.csv").string());
  std::string line;
  std::getline(index, line);
  require(line == "sample_index,capture_time_s,tx_index_truth,kind_truth,blend_alpha,seed", ErrorCode::kFormat,
          "unexpected capture index header");
  std::vector<CapturedFrame> out;
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    require(f.size() == 6, ErrorCode::kFormat, "malformed capture index row: " + line);
    CapturedFrame c;
    try {
      c.sample_index = std::stoll(f[0]);
      c.capture_time_s = std::stod(f[1]);
      c.tx_index_truth = std::stoi(f[2]);
      c.kind_truth = codec::kind_from_name(f[3]);
      c.blend_alpha = std::stod(f[4]);
      c.seed = std::stoull(f[5]);
    } catch (const std::logic_error&) {
      fail(ErrorCode::kFormat, "malformed capture index row: " + line);
    }
    c.image = read_pgm(dir / capture_file_name(c.sample_index));
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace s2c::channel
