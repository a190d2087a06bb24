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
#ifndef S2C_HARNESS_HPP
#define S2C_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "s2c/channel.hpp"
#include "s2c/cnn.hpp"
#include "s2c/dataset.hpp"
#include "s2c/kv_config.hpp"
#include "s2c/metrics.hpp"
#include "s2c/sync.hpp"
#include "s2c/train.hpp"

namespace s2c::harness {

/// Everything a CLI run depends on. Every field maps to one flat config key,
/// and to_kv() followed by from_kv() is the identity.
struct HarnessConfig {
  std::uint64_t seed = 1;
  data::DatasetSpec dataset;  // dataset.seed always mirrors `seed`
  data::SplitFractions split;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double lr = 0.001;
  channel::LinkConfig link;
  channel::ChannelParams link_channel;
  double dedup_threshold = sync::kDefaultDedupThreshold;
  std::size_t link_data_frames = 20;
  // "wall" records timing columns; "none" zeroes them for byte-stable output.
  bool record_time = true;
  std::string dataset_cache;  // empty: <out>/datasets

  KvConfig to_kv() const;
  static HarnessConfig from_kv(const KvConfig& kv);
  void validate() const;

  std::uint64_t split_seed() const;
  std::uint64_t train_seed(data::ExperimentId id) const;
  std::uint64_t link_seed() const;
  cnn::ModelSpec model_spec() const;
  cnn::TrainConfig train_config(data::ExperimentId id) const;
};

/// Returns the split manifest for `cfg`, generating the dataset under the
/// cache directory unless a complete copy with the same content hash exists.
data::DatasetManifest prepare_dataset(const HarnessConfig& cfg, const std::filesystem::path& cache_dir);

struct ExperimentReport {
  data::ExperimentId id = data::ExperimentId::kEx1;
  ConfusionMatrix cm;
  Metrics metrics;
  cnn::TrainReport training;
  double mean_inference_ms = 0.0;
  std::uint64_t dataset_seed = 0;
  std::uint64_t split_seed = 0;
  std::uint64_t train_seed = 0;
  KvConfig config;

  std::string metrics_csv() const;
};

/// Runs one experiment end to end. When `out_dir` is given, writes
/// config.txt, weights.s2cw, train_report.csv and metrics.csv there.
std::pair<ExperimentReport, cnn::Model> run_experiment(data::ExperimentId id, const HarnessConfig& cfg,
                                                       const std::filesystem::path& cache_dir,
                                                       const std::optional<std::filesystem::path>& out_dir);

/// Scores an existing model on the test split of experiment `id`.
ExperimentReport evaluate_experiment(data::ExperimentId id, const cnn::Model& model, const HarnessConfig& cfg,
                                     const std::filesystem::path& cache_dir);

/// Table of per-experiment rows plus a macro-average row.
std::string summary_csv(const std::vector<ExperimentReport>& reports);

/// Deterministic English-like filler text of exactly `chars` bytes.
std::string make_link_text(std::size_t chars, std::uint64_t seed);

struct LinkResult {
  sync::SyncReport report;
  std::size_t tx_entries = 0;
  std::size_t captures = 0;
  std::size_t deduplicated = 0;
  std::vector<std::size_t> true_overhead_indices;  // positions in the deduplicated stream
  std::size_t bits_sent = 0;

  bool overhead_exact() const { return report.detected_overhead_indices == true_overhead_indices; }
  double bit_error_rate() const;
  std::string summary_csv() const;
};

/// Simulates the full link for `text` with the trained overhead detector.
/// A run that never locks is returned with report.locked = false.
LinkResult run_link_benchmark(const HarnessConfig& cfg, const cnn::Model& overhead_model, const std::string& text,
                              std::uint64_t seed, const std::optional<std::filesystem::path>& out_dir);

}  // namespace s2c::harness

#endif  // S2C_HARNESS_HPP
