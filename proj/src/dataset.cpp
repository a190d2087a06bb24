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
#include "s2c/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "s2c/error.hpp"
#include "s2c/random.hpp"

namespace s2c::data {

channel::ChannelParams default_augmentation() {
  channel::ChannelParams p;
  p.rotation_deg = {-15.0, 15.0};
  p.crop_fraction = {0.80, 1.0};
  p.blur_sigma = {0.0, 1.2};
  p.brightness_delta = {-0.1, 0.1};
  p.noise_sigma = 0.02;
  return p;
}

// ---------------------------------------------------------------- spec

void DatasetSpec::validate() const {
  require(per_class_count >= 1, ErrorCode::kConfig, "per_class_count must be >= 1");
  require(classes.size() >= 2, ErrorCode::kConfig, "a dataset needs at least two classes");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      require(classes[i] != classes[j], ErrorCode::kConfig, "duplicate class in dataset spec");
    }
  }
  augmentation.validate();
  codec.validate();
}

KvConfig DatasetSpec::to_kv() const {
  KvConfig kv;
  kv.set("per_class_count", std::to_string(per_class_count));
  std::string cls;
  for (FrameKind k : classes) cls += (cls.empty() ? "" : ",") + std::string(codec::name(k));
  kv.set("classes", cls);
  kv.set("dataset_seed", std::to_string(seed));
  kv.set("aug_rotation_min", format_double(augmentation.rotation_deg.lo));
  kv.set("aug_rotation_max", format_double(augmentation.rotation_deg.hi));
  kv.set("aug_crop_min", format_double(augmentation.crop_fraction.lo));
  kv.set("aug_crop_max", format_double(augmentation.crop_fraction.hi));
  kv.set("aug_blur_min", format_double(augmentation.blur_sigma.lo));
  kv.set("aug_blur_max", format_double(augmentation.blur_sigma.hi));
  kv.set("aug_brightness_min", format_double(augmentation.brightness_delta.lo));
  kv.set("aug_brightness_max", format_double(augmentation.brightness_delta.hi));
  kv.set("aug_noise_sigma", format_double(augmentation.noise_sigma));
  kv.set("frame_px", std::to_string(codec.frame_px));
  kv.set("grid_cells", std::to_string(codec.grid_cells));
  kv.set("finder_size", std::to_string(codec.finder_size));
  kv.set("quiet_zone", std::to_string(codec.quiet_zone));
  return kv;
}

DatasetSpec DatasetSpec::from_kv(const KvConfig& kv) {
  DatasetSpec s;
  s.per_class_count = static_cast<std::size_t>(kv.get_uint("per_class_count", s.per_class_count));
  if (kv.contains("classes")) {
    s.classes.clear();
    std::stringstream ss(kv.get_string("classes", ""));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) s.classes.push_back(codec::kind_from_name(item));
    }
  }
  s.seed = kv.get_uint("dataset_seed", s.seed);
  auto& a = s.augmentation;
  a.rotation_deg = {kv.get_double("aug_rotation_min", a.rotation_deg.lo),
                    kv.get_double("aug_rotation_max", a.rotation_deg.hi)};
  a.crop_fraction = {kv.get_double("aug_crop_min", a.crop_fraction.lo),
                     kv.get_double("aug_crop_max", a.crop_fraction.hi)};
  a.blur_sigma = {kv.get_double("aug_blur_min", a.blur_sigma.lo), kv.get_double("aug_blur_max", a.blur_sigma.hi)};
  a.brightness_delta = {kv.get_double("aug_brightness_min", a.brightness_delta.lo),
                        kv.get_double("aug_brightness_max", a.brightness_delta.hi)};
  a.noise_sigma = kv.get_double("aug_noise_sigma", a.noise_sigma);
  s.codec.frame_px = static_cast<int>(kv.get_int("frame_px", s.codec.frame_px));
  s.codec.grid_cells = static_cast<int>(kv.get_int("grid_cells", s.codec.grid_cells));
  s.codec.finder_size = static_cast<int>(kv.get_int("finder_size", s.codec.finder_size));
  s.codec.quiet_zone = static_cast<int>(kv.get_int("quiet_zone", s.codec.quiet_zone));
  s.validate();
  return s;
}

std::uint64_t DatasetSpec::content_hash() const { return fnv1a64(to_kv().to_text()); }

// ---------------------------------------------------------------- splits & names

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kUnassigned: return "unassigned";
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Split split_from_name(std::string_view n) {
  for (Split s : {Split::kUnassigned, Split::kTrain, Split::kVal, Split::kTest}) {
    if (n == split_name(s)) return s;
  }
  fail(ErrorCode::kFormat, "unknown split: " + std::string(n));
}

std::size_t DatasetManifest::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const DatasetRecord& r) { return r.split == split; }));
}

std::size_t DatasetManifest::count(Split split, FrameKind kind) const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [&](const DatasetRecord& r) {
    return r.split == split && r.kind == kind;
  }));
}

std::string DatasetManifest::to_csv() const {
  std::string out = "id,path,kind,seed,split\n";
  for (const auto& r : records) {
    out += std::to_string(r.id) + "," + r.path + "," + std::string(codec::name(r.kind)) + "," +
           std::to_string(r.seed) + "," + std::string(split_name(r.split)) + "\n";
  }
  return out;
}

void DatasetManifest::save(const std::filesystem::path& csv_path) const {
  std::ofstream out(csv_path, std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIo, "cannot write manifest: " + csv_path.string());
  out << to_csv();
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot read manifest: " + csv_path.string());
  DatasetManifest m;
  m.root = csv_path.parent_path();
  std::string line;
  std::getline(in, line);
  require(line == "id,path,kind,seed,split", ErrorCode::kFormat, "unexpected manifest header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    require(f.size() == 5, ErrorCode::kFormat, "malformed manifest row: " + line);
    DatasetRecord r;
    try {
      r.id = std::stoull(f[0]);
      r.seed = std::stoull(f[3]);
    } catch (const std::logic_error&) {
      fail(ErrorCode::kFormat, "malformed manifest row: " + line);
    }
    r.path = f[1];
    r.kind = codec::kind_from_name(f[2]);
    r.split = split_from_name(f[4]);
    m.records.push_back(std::move(r));
  }
  return m;
}

// ---------------------------------------------------------------- generation

DatasetManifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "images", ec);
  require(!ec, ErrorCode::kIo, "cannot create dataset directory: " + out_dir.string());

  DatasetManifest m;
  m.root = out_dir;
  for (FrameKind kind : spec.classes) {
    const FrameImage base = codec::base_frame(kind, spec.codec);
    const std::string dir = "images/" + std::string(codec::name(kind));
    std::filesystem::create_directories(out_dir / dir, ec);
    require(!ec, ErrorCode::kIo, "cannot create directory: " + (out_dir / dir).string());
    for (std::size_t i = 0; i < spec.per_class_count; ++i) {
      DatasetRecord r;
      r.id = m.records.size();
      r.kind = kind;
      r.seed = derive_seed(spec.seed, {static_cast<std::uint64_t>(kind), i});
      char file[64];
      std::snprintf(file, sizeof(file), "/%s_%05zu.pgm", std::string(codec::name(kind)).c_str(), i);
      r.path = dir + file;
      write_pgm(out_dir / r.path, channel::distort(base, spec.augmentation, r.seed));
      m.records.push_back(std::move(r));
    }
  }
  m.save(out_dir / "manifest.csv");
  spec.to_kv().save(out_dir / "dataset_spec.txt");
  return m;
}

DatasetManifest split_dataset(const DatasetManifest& manifest, const SplitFractions& fr, std::uint64_t seed) {
  require(!manifest.records.empty(), ErrorCode::kConfig, "cannot split an empty manifest");
  require(fr.train >= 0 && fr.val >= 0 && fr.test >= 0 && std::fabs(fr.train + fr.val + fr.test - 1.0) < 1e-9,
          ErrorCode::kConfig, "split fractions must be non-negative and sum to 1");
  DatasetManifest out = manifest;
  std::map<FrameKind, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < out.records.size(); ++i) by_class[out.records[i].kind].push_back(i);

  for (auto& [kind, idx] : by_class) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(kind)}));
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t n = idx.size();
    const auto n_train = std::min(n, static_cast<std::size_t>(std::llround(n * fr.train)));
    const auto n_val = std::min(n - n_train, static_cast<std::size_t>(std::llround(n * fr.val)));
    for (std::size_t j = 0; j < n; ++j) {
      out.records[idx[j]].split = j < n_train ? Split::kTrain : j < n_train + n_val ? Split::kVal : Split::kTest;
    }
  }
  return out;
}

// ---------------------------------------------------------------- experiments

std::string_view experiment_name(ExperimentId id) {
  switch (id) {
    case ExperimentId::kEx1: return "ex1";
    case ExperimentId::kEx2: return "ex2";
    case ExperimentId::kEx3: return "ex3";
  }
  return "?";
}

ExperimentId experiment_from_name(std::string_view n) {
  for (ExperimentId id : {ExperimentId::kEx1, ExperimentId::kEx2, ExperimentId::kEx3}) {
    if (n == experiment_name(id)) return id;
  }
  fail(ErrorCode::kConfig, "unknown experiment: " + std::string(n) + " (expected ex1, ex2 or ex3)");
}

ExperimentSpec ExperimentSpec::for_id(ExperimentId id) {
  switch (id) {
    case ExperimentId::kEx1: return {id, {FrameKind::kDataQr1}, {FrameKind::kDataQr2}};
    case ExperimentId::kEx2: return {id, {FrameKind::kDataQr1, FrameKind::kDataQr2}, {FrameKind::kAscii}};
    case ExperimentId::kEx3: return {id, {FrameKind::kDataQr1, FrameKind::kDataQr2}, {FrameKind::kOverhead}};
  }
  fail(ErrorCode::kConfig, "unknown experiment id");
}

bool ExperimentSpec::contains(FrameKind kind) const { return label(kind).has_value(); }

std::optional<int> ExperimentSpec::label(FrameKind kind) const {
  if (std::find(positive.begin(), positive.end(), kind) != positive.end()) return 1;
  if (std::find(negative.begin(), negative.end(), kind) != negative.end()) return 0;
  return std::nullopt;
}

std::vector<std::size_t> experiment_indices(const DatasetManifest& manifest, const ExperimentSpec& experiment,
                                            Split split) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& r = manifest.records[i];
    if (r.split == split && experiment.contains(r.kind)) out.push_back(i);
  }
  return out;
}

Batch load_batch(const DatasetManifest& manifest, std::span<const std::size_t> indices,
                 const ExperimentSpec& experiment) {
  require(!indices.empty(), ErrorCode::kShape, "empty batch");
  std::vector<FrameImage> images;
  std::vector<float> labels;
  images.reserve(indices.size());
  for (std::size_t idx : indices) {
    require(idx < manifest.records.size(), ErrorCode::kLabelMap, "record index out of range");
    const DatasetRecord& r = manifest.records[idx];
    const auto label = experiment.label(r.kind);
    require(label.has_value(), ErrorCode::kLabelMap,
            "record " + std::to_string(r.id) + " (" + std::string(codec::name(r.kind)) + ") is not part of " +
                std::string(experiment_name(experiment.id)));
    images.push_back(read_pgm(manifest.root / r.path));
    labels.push_back(static_cast<float>(*label));
  }
  const auto h = static_cast<std::size_t>(images.front().height());
  const auto w = static_cast<std::size_t>(images.front().width());
  Batch batch{cnn::Tensor({images.size(), 1, h, w}), cnn::Tensor({images.size(), 1}, std::move(labels))};
  for (std::size_t b = 0; b < images.size(); ++b) {
    require(static_cast<std::size_t>(images[b].width()) == w && static_cast<std::size_t>(images[b].height()) == h,
            ErrorCode::kShape, "images in a batch must share dimensions");
    std::copy(images[b].pixels().begin(), images[b].pixels().end(), batch.images.outer(b).begin());
  }
  return batch;
}

}  // namespace s2c::data
