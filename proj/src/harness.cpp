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
#include "s2c/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>

#include "s2c/error.hpp"
#include "s2c/frame_codec.hpp"
#include "s2c/random.hpp"

namespace s2c::harness {

namespace fs = std::filesystem;

namespace {

// Seed-derivation tags; one per consumer of the master seed.
constexpr std::uint64_t kSplitTag = 2;
constexpr std::uint64_t kTrainTag = 3;
constexpr std::uint64_t kLinkTag = 4;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k{"seed", "split_train", "split_val", "split_test", "epochs", "batch_size", "lr",
                            "tx_refresh_hz", "tx_data_fps", "cam_fps", "distance_cm", "tilt_deg",
                            "rotation_deg", "overhead_period", "start_time_s", "link_noise_sigma",
                            "link_blur_sigma", "exposure_s", "oversampling", "dedup_threshold",
                            "link_data_frames", "clock", "dataset_cache"};
    KvConfig ds = data::DatasetSpec{}.to_kv();
    for (const auto& [key, value] : ds.values()) {
      if (key != "dataset_seed") k.insert(key);
    }
    return k;
  }();
  return keys;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorCode::kIo, "write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorCode::kIo, "cannot create directory " + dir.string());
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = kDigits[v & 0xF];
  return s;
}

}  // namespace

// ------------------------------------------------------------------ config

KvConfig HarnessConfig::to_kv() const {
  KvConfig kv = dataset.to_kv();
  kv.erase("dataset_seed");
  kv.set("seed", std::to_string(seed));
  kv.set("split_train", format_double(split.train));
  kv.set("split_val", format_double(split.val));
  kv.set("split_test", format_double(split.test));
  kv.set("epochs", std::to_string(epochs));
  kv.set("batch_size", std::to_string(batch_size));
  kv.set("lr", format_double(lr));
  kv.set("tx_refresh_hz", format_double(link.tx_refresh_hz));
  kv.set("tx_data_fps", format_double(link.tx_data_fps));
  kv.set("cam_fps", format_double(link.cam_fps));
  kv.set("distance_cm", format_double(link.distance_cm));
  kv.set("tilt_deg", format_double(link.tilt_deg));
  kv.set("rotation_deg", format_double(link.rotation_deg));
  kv.set("overhead_period", std::to_string(link.overhead_period));
  kv.set("start_time_s", format_double(link.start_time_s));
  kv.set("link_noise_sigma", format_double(link_channel.noise_sigma));
  kv.set("link_blur_sigma", format_double(link_channel.blur_sigma.hi));
  kv.set("exposure_s", format_double(link_channel.exposure_s));
  kv.set("oversampling", std::to_string(link_channel.oversampling));
  kv.set("dedup_threshold", format_double(dedup_threshold));
  kv.set("link_data_frames", std::to_string(link_data_frames));
  kv.set("clock", record_time ? "wall" : "none");
  kv.set("dataset_cache", dataset_cache);
  return kv;
}

HarnessConfig HarnessConfig::from_kv(const KvConfig& kv) {
  kv.reject_unknown(known_keys());
  HarnessConfig c;
  c.seed = kv.get_uint("seed", c.seed);
  c.dataset = data::DatasetSpec::from_kv(kv);
  c.dataset.seed = c.seed;
  c.split.train = kv.get_double("split_train", c.split.train);
  c.split.val = kv.get_double("split_val", c.split.val);
  c.split.test = kv.get_double("split_test", c.split.test);
  c.epochs = static_cast<std::size_t>(kv.get_uint("epochs", c.epochs));
  c.batch_size = static_cast<std::size_t>(kv.get_uint("batch_size", c.batch_size));
  c.lr = kv.get_double("lr", c.lr);
  auto& l = c.link;
  l.tx_refresh_hz = kv.get_double("tx_refresh_hz", l.tx_refresh_hz);
  l.tx_data_fps = kv.get_double("tx_data_fps", l.tx_data_fps);
  l.cam_fps = kv.get_double("cam_fps", l.cam_fps);
  l.distance_cm = kv.get_double("distance_cm", l.distance_cm);
  l.tilt_deg = kv.get_double("tilt_deg", l.tilt_deg);
  l.rotation_deg = kv.get_double("rotation_deg", l.rotation_deg);
  l.overhead_period = static_cast<int>(kv.get_int("overhead_period", l.overhead_period));
  l.start_time_s = kv.get_double("start_time_s", l.start_time_s);
  auto& ch = c.link_channel;
  ch.noise_sigma = kv.get_double("link_noise_sigma", ch.noise_sigma);
  const double blur = kv.get_double("link_blur_sigma", ch.blur_sigma.hi);
  ch.blur_sigma = {blur, blur};
  ch.exposure_s = kv.get_double("exposure_s", ch.exposure_s);
  ch.oversampling = static_cast<int>(kv.get_int("oversampling", ch.oversampling));
  c.dedup_threshold = kv.get_double("dedup_threshold", c.dedup_threshold);
  c.link_data_frames = static_cast<std::size_t>(kv.get_uint("link_data_frames", c.link_data_frames));
  const std::string clock = kv.get_string("clock", "wall");
  require(clock == "wall" || clock == "none", ErrorCode::kConfig, "clock must be 'wall' or 'none'");
  c.record_time = clock == "wall";
  c.dataset_cache = kv.get_string("dataset_cache", "");
  c.validate();
  return c;
}

void HarnessConfig::validate() const {
  dataset.validate();
  const double total = split.train + split.val + split.test;
  require(split.train > 0 && split.val > 0 && split.test > 0 && std::fabs(total - 1.0) < 1e-9, ErrorCode::kConfig,
          "split fractions must be positive and sum to 1");
  train_config(data::ExperimentId::kEx1).validate();
  link.validate();
  link_channel.validate();
  require(dedup_threshold >= 0.0, ErrorCode::kConfig, "dedup_threshold must be >= 0");
  require(link_data_frames > 0, ErrorCode::kConfig, "link_data_frames must be > 0");
}

std::uint64_t HarnessConfig::split_seed() const { return derive_seed(seed, {kSplitTag}); }

std::uint64_t HarnessConfig::train_seed(data::ExperimentId id) const {
  return derive_seed(seed, {kTrainTag, static_cast<std::uint64_t>(id)});
}

std::uint64_t HarnessConfig::link_seed() const { return derive_seed(seed, {kLinkTag}); }

cnn::ModelSpec HarnessConfig::model_spec() const {
  cnn::ModelSpec spec = cnn::ModelSpec::standard();
  spec.in_height = static_cast<std::size_t>(dataset.codec.frame_px);
  spec.in_width = static_cast<std::size_t>(dataset.codec.frame_px);
  return spec;
}

cnn::TrainConfig HarnessConfig::train_config(data::ExperimentId id) const {
  cnn::TrainConfig t;
  t.epochs = epochs;
  t.batch_size = batch_size;
  t.lr = lr;
  t.seed = train_seed(id);
  t.record_time = record_time;
  return t;
}

// ------------------------------------------------------------------ experiments

data::DatasetManifest prepare_dataset(const HarnessConfig& cfg, const fs::path& cache_dir) {
  const fs::path dir = cache_dir / hex64(cfg.dataset.content_hash());
  data::DatasetManifest manifest;
  // dataset_spec.txt is written last, so its presence marks a complete copy.
  if (fs::exists(dir / "dataset_spec.txt") && fs::exists(dir / "manifest.csv") &&
      KvConfig::load(dir / "dataset_spec.txt").to_text() == cfg.dataset.to_kv().to_text()) {
    manifest = data::DatasetManifest::load(dir / "manifest.csv");
  } else {
    ensure_dir(dir);
    manifest = data::generate_dataset(cfg.dataset, dir);
  }
  return data::split_dataset(manifest, cfg.split, cfg.split_seed());
}

std::string ExperimentReport::metrics_csv() const {
  std::string out = "experiment,precision,recall,f1,accuracy,tp,fp,fn,tn,degenerate,mean_inference_ms\n";
  out += std::string(data::experiment_name(id)) + "," + format_double(metrics.precision) + "," +
         format_double(metrics.recall) + "," + format_double(metrics.f1) + "," + format_double(metrics.accuracy) +
         "," + std::to_string(cm.tp) + "," + std::to_string(cm.fp) + "," + std::to_string(cm.fn) + "," +
         std::to_string(cm.tn) + "," + (metrics.degenerate ? "1" : "0") + "," + format_double(mean_inference_ms) +
         "\n";
  return out;
}

namespace {

ExperimentReport score(data::ExperimentId id, const cnn::Model& model, const HarnessConfig& cfg,
                       const data::DatasetManifest& manifest) {
  const auto experiment = data::ExperimentSpec::for_id(id);
  const auto test_idx = data::experiment_indices(manifest, experiment, data::Split::kTest);
  require(!test_idx.empty(), ErrorCode::kConfig, "test split is empty");
  const data::Batch batch = data::load_batch(manifest, test_idx, experiment);
  const cnn::Evaluation ev = cnn::evaluate(model, batch, cfg.batch_size, cfg.record_time);

  ExperimentReport r;
  r.id = id;
  r.cm = confusion(ev.labels, ev.predictions);
  r.metrics = metrics(r.cm);
  r.mean_inference_ms = ev.mean_inference_ms;
  r.dataset_seed = cfg.dataset.seed;
  r.split_seed = cfg.split_seed();
  r.train_seed = cfg.train_seed(id);
  r.config = cfg.to_kv();
  return r;
}

}  // namespace

std::pair<ExperimentReport, cnn::Model> run_experiment(data::ExperimentId id, const HarnessConfig& cfg,
                                                       const fs::path& cache_dir,
                                                       const std::optional<fs::path>& out_dir) {
  cfg.validate();
  const data::DatasetManifest manifest = prepare_dataset(cfg, cache_dir);
  const auto experiment = data::ExperimentSpec::for_id(id);
  auto [model, training] = cnn::train(cfg.model_spec(), manifest, experiment, cfg.train_config(id));
  ExperimentReport report = score(id, model, cfg, manifest);
  report.training = std::move(training);
  if (out_dir) {
    ensure_dir(*out_dir);
    report.config.save(*out_dir / "config.txt");
    cnn::save_weights(model, *out_dir / "weights.s2cw");
    report.training.save_csv(*out_dir / "train_report.csv");
    write_text(*out_dir / "metrics.csv", report.metrics_csv());
  }
  return {std::move(report), std::move(model)};
}

ExperimentReport evaluate_experiment(data::ExperimentId id, const cnn::Model& model, const HarnessConfig& cfg,
                                     const fs::path& cache_dir) {
  cfg.validate();
  require(model.spec() == cfg.model_spec(), ErrorCode::kShape, "model input size does not match frame_px");
  return score(id, model, cfg, prepare_dataset(cfg, cache_dir));
}

std::string summary_csv(const std::vector<ExperimentReport>& reports) {
  std::string out = "experiment,precision,recall,f1,accuracy,mean_inference_ms\n";
  std::vector<Metrics> all;
  double ms = 0.0;
  for (const auto& r : reports) {
    out += std::string(data::experiment_name(r.id)) + "," + format_double(r.metrics.precision) + "," +
           format_double(r.metrics.recall) + "," + format_double(r.metrics.f1) + "," +
           format_double(r.metrics.accuracy) + "," + format_double(r.mean_inference_ms) + "\n";
    all.push_back(r.metrics);
    ms += r.mean_inference_ms;
  }
  if (!all.empty()) {
    const Metrics avg = macro_average(all);
    out += "average," + format_double(avg.precision) + "," + format_double(avg.recall) + "," +
           format_double(avg.f1) + "," + format_double(avg.accuracy) + "," +
           format_double(ms / static_cast<double>(all.size())) + "\n";
  }
  return out;
}

// ------------------------------------------------------------------ link

std::string make_link_text(std::size_t chars, std::uint64_t seed) {
  static const char* const kWords[] = {
      "screen", "camera", "light", "frame", "signal", "pixel",  "code",   "data",  "phone",  "link",
      "the",    "of",     "and",   "to",    "a",      "in",     "is",     "that",  "for",    "it",
      "with",   "as",     "was",   "on",    "be",     "at",     "by",     "this",  "from",   "or",
      "bright", "dark",   "sends", "reads", "every",  "second", "quickly", "cell", "stream", "bits"};
  constexpr std::size_t kCount = sizeof(kWords) / sizeof(kWords[0]);
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, kCount - 1);
  std::string text;
  text.reserve(chars + 16);
  while (text.size() < chars) {
    if (!text.empty()) text.push_back(' ');
    text += kWords[pick(rng)];
  }
  text.resize(chars);
  return text;
}

double LinkResult::bit_error_rate() const {
  if (bits_sent == 0) return 0.0;
  return static_cast<double>(report.bit_errors.value_or(bits_sent)) / static_cast<double>(bits_sent);
}

std::string LinkResult::summary_csv() const {
  auto join = [](const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i : v) s += (s.empty() ? "" : ";") + std::to_string(i);
    return s;
  };
  std::string out =
      "tx_entries,captures,deduplicated,bits_sent,true_overhead_indices,detected_overhead_indices,overhead_exact,"
      "bit_errors,ber,locked\n";
  out += std::to_string(tx_entries) + "," + std::to_string(captures) + "," + std::to_string(deduplicated) + "," +
         std::to_string(bits_sent) + "," + join(true_overhead_indices) + "," +
         join(report.detected_overhead_indices) + "," + (overhead_exact() ? "1" : "0") + "," +
         (report.bit_errors ? std::to_string(*report.bit_errors) : "na") + "," + format_double(bit_error_rate()) +
         "," + (report.locked ? "1" : "0") + "\n";
  return out;
}

LinkResult run_link_benchmark(const HarnessConfig& cfg, const cnn::Model& overhead_model, const std::string& text,
                              std::uint64_t seed, const std::optional<fs::path>& out_dir) {
  cfg.validate();
  const codec::CodecConfig& cc = cfg.dataset.codec;
  const auto data_kind = codec::FrameKind::kDataQr1;
  const codec::Bitstream bits = codec::Bitstream::from_text(text);
  require(!bits.empty(), ErrorCode::kConfig, "link text is empty");
  const auto payloads = codec::segment_stream(bits, cc.capacity(data_kind), data_kind);

  const channel::TxSchedule schedule = channel::build_schedule(payloads, cfg.link, cc, derive_seed(seed, {1}));
  channel::ChannelParams params = cfg.link_channel;
  params.seed = derive_seed(seed, {2});
  const auto captures = channel::capture_stream(schedule, params, cfg.link.cam_fps);
  const auto kept = sync::dedup_stream(captures, cfg.dedup_threshold);

  const sync::ModelClassifier classifier(overhead_model);
  const sync::Detection detection = sync::detect_overhead(kept, classifier);

  sync::RecoverOptions opts;
  opts.truth_length = bits.size();
  opts.truth = bits;
  opts.expected_period = static_cast<std::size_t>(cfg.link.overhead_period);
  opts.data_kind = data_kind;
  opts.classify_s = detection.mean_classify_s;
  opts.record_time = cfg.record_time;

  LinkResult result;
  result.report = sync::align_and_recover(kept, detection.overhead_indices, cc, opts);
  result.tx_entries = schedule.entries.size();
  result.captures = captures.size();
  result.deduplicated = kept.size();
  result.bits_sent = bits.size();
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i].kind_truth == codec::FrameKind::kOverhead) result.true_overhead_indices.push_back(i);
  }

  if (out_dir) {
    ensure_dir(*out_dir);
    channel::write_capture_stream(*out_dir / "captures", captures);
    result.report.save_csv(*out_dir / "sync_report.csv");
    write_text(*out_dir / "link_summary.csv", result.summary_csv());
  }
  return result;
}

}  // namespace s2c::harness
