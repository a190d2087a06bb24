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
#ifndef S2C_DATASET_HPP
#define S2C_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "s2c/channel.hpp"
#include "s2c/frame_codec.hpp"
#include "s2c/kv_config.hpp"
#include "s2c/tensor.hpp"

namespace s2c::data {

using codec::FrameKind;

/// Default augmentation: rotation +-15 deg, crop 80-100 %, blur sigma 0-1.2,
/// brightness +-0.1, noise sigma 0.02.
channel::ChannelParams default_augmentation();

struct DatasetSpec {
  std::size_t per_class_count = 1000;
  std::vector<FrameKind> classes{std::begin(codec::kAllKinds), std::end(codec::kAllKinds)};
  channel::ChannelParams augmentation = default_augmentation();
  std::uint64_t seed = 1;
  codec::CodecConfig codec;

  void validate() const;
  /// Canonical key=value form; also the cache key input.
  KvConfig to_kv() const;
  static DatasetSpec from_kv(const KvConfig& kv);
  std::uint64_t content_hash() const;
};

enum class Split : std::uint8_t { kUnassigned, kTrain, kVal, kTest };
std::string_view split_name(Split split);
Split split_from_name(std::string_view name);

struct DatasetRecord {
  std::size_t id = 0;
  /// Relative to the manifest directory.
  std::string path;
  FrameKind kind = FrameKind::kDataQr1;
  std::uint64_t seed = 0;
  Split split = Split::kUnassigned;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<DatasetRecord> records;

  std::size_t count(Split split) const;
  std::size_t count(Split split, FrameKind kind) const;

  /// CSV: id,path,kind,seed,split
  std::string to_csv() const;
  void save(const std::filesystem::path& csv_path) const;
  static DatasetManifest load(const std::filesystem::path& csv_path);
};

/// Renders each class's base frame and `per_class_count` distorted variants
/// into `out_dir`, writing PGM files and manifest.csv.
DatasetManifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir);

struct SplitFractions {
  double train = 0.60;
  double val = 0.15;
  double test = 0.25;
};

/// Seeded, stratified by class; per class train = round(n f_train),
/// val = round(n f_val), test = the rest.
DatasetManifest split_dataset(const DatasetManifest& manifest, const SplitFractions& fractions, std::uint64_t seed);

enum class ExperimentId : std::uint8_t { kEx1, kEx2, kEx3 };
std::string_view experiment_name(ExperimentId id);
ExperimentId experiment_from_name(std::string_view name);

/// Binary label map of an experiment: positives are label 1.
struct ExperimentSpec {
  ExperimentId id = ExperimentId::kEx1;
  std::vector<FrameKind> positive;
  std::vector<FrameKind> negative;

  static ExperimentSpec for_id(ExperimentId id);
  bool contains(FrameKind kind) const;
  std::optional<int> label(FrameKind kind) const;
};

/// Indices into manifest.records for one split, restricted to the experiment's classes.
std::vector<std::size_t> experiment_indices(const DatasetManifest& manifest, const ExperimentSpec& experiment,
                                            Split split);

struct Batch {
  cnn::Tensor images;  // B x 1 x H x W, pixels in [0, 1]
  cnn::Tensor labels;  // B x 1
};

Batch load_batch(const DatasetManifest& manifest, std::span<const std::size_t> indices,
                 const ExperimentSpec& experiment);

}  // namespace s2c::data

#endif  // S2C_DATASET_HPP
