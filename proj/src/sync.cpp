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
#include "s2c/sync.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "s2c/error.hpp"
#include "s2c/kv_config.hpp"

namespace s2c::sync {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Is `x` (approximately) alpha * a + (1 - alpha) * b with 0 < alpha < 1?
// Returns the fitted alpha, or a negative value when it is not.
double transition_alpha(const FrameImage& a, const FrameImage& x, const FrameImage& b, double threshold) {
  const double d_ab = mean_abs_diff(a, b);
  if (d_ab < threshold) return -1.0;
  auto pa = a.pixels();
  auto px = x.pixels();
  auto pb = b.pixels();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double ab = double(pa[i]) - pb[i];
    num += (double(px[i]) - pb[i]) * ab;
    den += ab * ab;
  }
  if (den <= 0.0) return -1.0;
  const double alpha = num / den;
  if (alpha <= 0.02 || alpha >= 0.98) return -1.0;
  double residual = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    residual += std::fabs(double(px[i]) - (alpha * pa[i] + (1.0 - alpha) * pb[i]));
  }
  residual /= static_cast<double>(pa.size());
  return residual <= 0.25 * d_ab ? alpha : -1.0;
}

}  // namespace

std::vector<CapturedFrame> dedup_stream(const std::vector<CapturedFrame>& captures, double threshold) {
  require(threshold >= 0.0, ErrorCode::kConfig, "dedup threshold must be >= 0");
  if (captures.empty()) return {};
  std::vector<std::vector<std::size_t>> runs;
  std::vector<std::size_t> current{0};
  std::vector<std::size_t> pending;  // blends that belong to the next run
  std::size_t ref = 0;
  for (std::size_t i = 1; i < captures.size(); ++i) {
    if (mean_abs_diff(captures[ref].image, captures[i].image) < threshold) {
      current.insert(current.end(), pending.begin(), pending.end());
      pending.clear();
      current.push_back(i);
      continue;
    }
    if (i + 1 < captures.size()) {
      const double alpha =
          transition_alpha(captures[i - 1].image, captures[i].image, captures[i + 1].image, threshold);
      if (alpha >= 0.5) {
        current.push_back(i);
        continue;
      }
      if (alpha > 0.0) {
        pending.push_back(i);
        continue;
      }
    }
    runs.push_back(std::move(current));
    current = std::move(pending);
    pending.clear();
    current.push_back(i);
    ref = i;
  }
  current.insert(current.end(), pending.begin(), pending.end());
  runs.push_back(std::move(current));

  std::vector<CapturedFrame> kept;
  kept.reserve(runs.size());
  for (const auto& run : runs) {
    std::size_t best = run.front();
    for (std::size_t idx : run) {
      if (captures[idx].blend_alpha > captures[best].blend_alpha) best = idx;
    }
    kept.push_back(captures[best]);
  }
  return kept;
}

float ModelClassifier::data_probability(const FrameImage& frame) const {
  const auto& s = model_.spec();
  require(s.in_channels == 1 && static_cast<std::size_t>(frame.width()) == s.in_width &&
              static_cast<std::size_t>(frame.height()) == s.in_height,
          ErrorCode::kContract, "classifier input size does not match the captured frame");
  return cnn::predict(model_, frame.pixels());
}

Detection detect_overhead(const std::vector<CapturedFrame>& frames, const FrameClassifier& classifier) {
  Detection det;
  double total = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto start = Clock::now();
    const float p = classifier.data_probability(frames[i].image);
    total += seconds_since(start);
    if (p < 0.5F) det.overhead_indices.push_back(i);
  }
  det.mean_classify_s = frames.empty() ? 0.0 : total / static_cast<double>(frames.size());
  return det;
}

SyncReport align_and_recover(const std::vector<CapturedFrame>& frames, const std::vector<std::size_t>& overhead_indices,
                             const codec::CodecConfig& codec, const RecoverOptions& options) {
  SyncReport report;
  report.detected_overhead_indices = overhead_indices;
  std::sort(report.detected_overhead_indices.begin(), report.detected_overhead_indices.end());
  report.detected_overhead_indices.erase(
      std::unique(report.detected_overhead_indices.begin(), report.detected_overhead_indices.end()),
      report.detected_overhead_indices.end());
  if (report.detected_overhead_indices.empty()) {
    if (options.truth) report.bit_errors = options.truth->size();
    return report;
  }

  SyncState state;
  state.expected_period = options.expected_period;
  std::size_t next_overhead = 0;
  double decode_total = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto start = Clock::now();
    const auto& ov = report.detected_overhead_indices;
    if (next_overhead < ov.size() && ov[next_overhead] == i) {
      ++next_overhead;
      if (state.mode == SyncMode::kLocked && state.since_anchor != state.expected_period) ++report.irregular_groups;
      // Re-anchor: frame counting restarts at every overhead.
      state.mode = SyncMode::kLocked;
      state.anchor = i;
      state.since_anchor = 0;
      continue;
    }
    if (state.mode != SyncMode::kLocked) continue;
    const codec::FramePayload payload = codec::decode_frame(frames[i].image, options.data_kind, codec);
    report.recovered_bits.append(payload.bits);
    ++state.since_anchor;
    ++report.data_frames_decoded;
    decode_total += seconds_since(start);
  }
  report.locked = state.mode == SyncMode::kLocked;
  if (options.truth_length > 0 && report.recovered_bits.size() > options.truth_length) {
    report.recovered_bits.resize(options.truth_length);
  }
  if (options.truth) report.bit_errors = codec::hamming_distance(report.recovered_bits, *options.truth);

  if (options.record_time && report.data_frames_decoded > 0) {
    report.T_cnn = options.classify_s;
    report.T = options.classify_s + decode_total / static_cast<double>(report.data_frames_decoded);
    if (report.T > 0.0) {
      report.gain = system_gain(report.T, report.T_cnn);
      report.effort_ratio_data = 1.0;
      report.effort_ratio_overhead = report.T_cnn / report.T;
    }
  }
  return report;
}

double system_gain(double T, double T_cnn) {
  require(T > 0.0, ErrorCode::kDomain, "frame computation time T must be positive");
  require(T_cnn >= 0.0 && T_cnn <= T, ErrorCode::kDomain, "classifier time must lie in [0, T]");
  return (T - T_cnn) / T;
}

std::string SyncReport::to_csv() const {
  std::string indices;
  for (std::size_t i : detected_overhead_indices) indices += (indices.empty() ? "" : ";") + std::to_string(i);
  std::string out = "locked,overhead_indices,bits_recovered,bit_errors,T_ms,T_cnn_ms,gain\n";
  out += std::string(locked ? "1" : "0") + "," + indices + "," + std::to_string(recovered_bits.size()) + "," +
         (bit_errors ? std::to_string(*bit_errors) : "na") + "," + format_double(T * 1000.0) + "," +
         format_double(T_cnn * 1000.0) + "," + (gain ? format_double(*gain) : "na") + "\n";
  return out;
}

void SyncReport::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
  out << to_csv();
}

}  // namespace s2c::sync
