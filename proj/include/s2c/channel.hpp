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
#ifndef S2C_CHANNEL_HPP
#define S2C_CHANNEL_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "s2c/frame_codec.hpp"
#include "s2c/image.hpp"

namespace s2c::channel {

/// Link parameters of the screen-to-camera setup.
struct LinkConfig {
  double tx_refresh_hz = 120.0;
  double tx_data_fps = 0.75;
  double cam_fps = 60.0;
  double distance_cm = 20.0;
  // Recorded only; geometry acts through ChannelParams ranges.
  double tilt_deg = 0.0;
  double rotation_deg = 0.0;
  /// Data frames between consecutive overhead frames.
  int overhead_period = 10;
  /// Stream start time t_b on the transmitter clock.
  double start_time_s = 0.0;

  double frame_duration() const { return 1.0 / tx_data_fps; }
  void validate() const;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

/// Photometric / geometric distortion and camera sampling parameters.
struct ChannelParams {
  double noise_sigma = 0.02;
  Range blur_sigma{0.0, 0.0};
  Range rotation_deg{0.0, 0.0};
  /// Fraction of each side kept by the random crop.
  Range crop_fraction{1.0, 1.0};
  Range brightness_delta{0.0, 0.0};
  double exposure_s = 1.0 / 120.0;
  /// Captures per camera period (sampling at t = n / (cam_fps * Q)).
  int oversampling = 1;
  std::uint64_t seed = 0;

  /// Every magnitude zero: distort() is the identity.
  static ChannelParams identity();
  void validate() const;
};

struct TxEntry {
  FrameImage image;
  codec::FrameKind kind = codec::FrameKind::kDataQr1;
  /// Start on the transmitter clock: t_b + k * F.
  double start_s = 0.0;
  double duration_s = 0.0;
  /// Index into the data payload list, -1 for overhead frames.
  int data_index = -1;
};

/// Timed display sequence. The receiver sees entry k during
/// [t_0 + start_s, t_0 + start_s + duration_s) on its own clock.
struct TxSchedule {
  std::vector<TxEntry> entries;
  double t_b = 0.0;
  double t_0 = 0.0;
  double frame_duration = 0.0;

  double span_begin() const { return t_b + t_0; }
  double span_end() const { return span_begin() + static_cast<double>(entries.size()) * frame_duration; }
  std::size_t data_frame_count() const;
};

struct CapturedFrame {
  FrameImage image;
  std::int64_t sample_index = 0;
  double capture_time_s = 0.0;
  int tx_index_truth = -1;
  codec::FrameKind kind_truth = codec::FrameKind::kDataQr1;
  /// Weight of the dominant transmitted frame inside the exposure window.
  double blend_alpha = 1.0;
  std::uint64_t seed = 0;
};

/// rotate -> crop+resize -> blur -> brightness -> noise, deterministic in `seed`.
FrameImage distort(const FrameImage& img, const ChannelParams& params, std::uint64_t seed);

// Individual stages, exposed for tests.
FrameImage rotate_bilinear(const FrameImage& img, double degrees);
FrameImage crop_resize(const FrameImage& img, double fraction, double offset_x, double offset_y);
FrameImage gaussian_blur(const FrameImage& img, double sigma);

/// Capture time of sample `n`.
double capture_time(std::int64_t n, double cam_fps, int oversampling = 1);

/// One camera sample; throws kOutOfStream if the exposure window leaves the schedule.
CapturedFrame sample_rx(const TxSchedule& schedule, const ChannelParams& params, std::int64_t n, double cam_fps);

/// Every sample whose exposure window lies inside the schedule span, in order.
std::vector<CapturedFrame> capture_stream(const TxSchedule& schedule, const ChannelParams& params, double cam_fps);

/// Overhead frame at stream start and before every group of `overhead_period`
/// data frames; t_0 ~ U[0, F) drawn from `seed`.
TxSchedule build_schedule(const std::vector<codec::FramePayload>& payloads, const LinkConfig& cfg,
                          const codec::CodecConfig& codec, std::uint64_t seed);

/// Numbered PGM files plus index.csv
/// (sample_index, capture_time_s, tx_index_truth, kind_truth, blend_alpha, seed).
void write_capture_stream(const std::filesystem::path& dir, const std::vector<CapturedFrame>& captures);
std::vector<CapturedFrame> read_capture_stream(const std::filesystem::path& dir);

}  // namespace s2c::channel

#endif  // S2C_CHANNEL_HPP
