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
#ifndef S2C_SYNC_HPP
#define S2C_SYNC_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "s2c/channel.hpp"
#include "s2c/cnn.hpp"
#include "s2c/frame_codec.hpp"

namespace s2c::sync {

using channel::CapturedFrame;

inline constexpr double kDefaultDedupThreshold = 0.02;

/// Collapses runs of captures showing the same transmitted frame.
///
/// A run continues while the mean absolute difference to its first capture
/// stays below `threshold`. A capture that differs from the run but is a
/// convex blend of its two stream neighbours (an exposure straddling a frame
/// boundary) is folded into the neighbour it is closer to instead of opening
/// a run of its own. Each run keeps its capture with the highest blend_alpha.
std::vector<CapturedFrame> dedup_stream(const std::vector<CapturedFrame>& captures,
                                        double threshold = kDefaultDedupThreshold);

/// Probability that a frame is a data frame (the positive class of the overhead experiment).
class FrameClassifier {
 public:
  virtual ~FrameClassifier() = default;
  virtual float data_probability(const FrameImage& frame) const = 0;
};

class ModelClassifier final : public FrameClassifier {
 public:
  explicit ModelClassifier(const cnn::Model& model) : model_(model) {}
  float data_probability(const FrameImage& frame) const override;

 private:
  const cnn::Model& model_;
};

struct Detection {
  std::vector<std::size_t> overhead_indices;
  /// Mean classifier time per frame, seconds.
  double mean_classify_s = 0.0;
};

/// Index i is overhead when the data probability is below 0.5.
Detection detect_overhead(const std::vector<CapturedFrame>& frames, const FrameClassifier& classifier);

enum class SyncMode : std::uint8_t { kSearching, kLocked };

struct SyncState {
  SyncMode mode = SyncMode::kSearching;
  std::optional<std::size_t> anchor;
  std::size_t expected_period = 10;
  /// Data frames decoded since the last anchor.
  std::size_t since_anchor = 0;
};

struct SyncReport {
  bool locked = false;
  std::vector<std::size_t> detected_overhead_indices;
  codec::Bitstream recovered_bits;
  std::optional<std::size_t> bit_errors;
  std::size_t data_frames_decoded = 0;
  /// Groups between overheads whose size differed from the expected period (last group excluded).
  std::size_t irregular_groups = 0;
  /// Full per-frame processing time (classify + decode + bookkeeping), seconds.
  double T = 0.0;
  /// Classifier-only time per frame, seconds.
  double T_cnn = 0.0;
  /// (T - T_cnn) / T, or nullopt when undefined (no timing recorded).
  std::optional<double> gain;
  /// Per-kind processing time relative to T.
  double effort_ratio_data = 0.0;
  double effort_ratio_overhead = 0.0;

  /// locked,overhead_indices,bits_recovered,bit_errors,T_ms,T_cnn_ms,gain
  std::string to_csv() const;
  void save_csv(const std::filesystem::path& path) const;
};

struct RecoverOptions {
  std::size_t truth_length = 0;
  std::optional<codec::Bitstream> truth;
  std::size_t expected_period = 10;
  codec::FrameKind data_kind = codec::FrameKind::kDataQr1;
  /// Classifier time per frame measured upstream; folded into T.
  double classify_s = 0.0;
  bool record_time = true;
};

/// Locks at the first overhead, decodes the data frames that follow each
/// overhead in order and trims padding to `truth_length`. Overhead payloads
/// are never decoded. Without any overhead the report is unlocked and empty.
SyncReport align_and_recover(const std::vector<CapturedFrame>& frames, const std::vector<std::size_t>& overhead_indices,
                             const codec::CodecConfig& codec, const RecoverOptions& options);

/// (T - T_cnn) / T; requires T > 0 and 0 <= T_cnn <= T.
double system_gain(double T, double T_cnn);

}  // namespace s2c::sync

#endif  // S2C_SYNC_HPP
