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
#include <set>

#include "doctest.h"
#include "s2c/channel.hpp"
#include "s2c/error.hpp"
#include "s2c/sync.hpp"
#include "test_util.hpp"

using namespace s2c;
using namespace s2c::sync;
using channel::CapturedFrame;

namespace {

// Perfect overhead detector: compares against the reference overhead frame.
class OracleClassifier final : public FrameClassifier {
 public:
  explicit OracleClassifier(const codec::CodecConfig& cfg) : overhead_(codec::make_overhead_frame(cfg)) {}
  float data_probability(const FrameImage& frame) const override {
    return mean_abs_diff(frame, overhead_) < 0.1 ? 0.0F : 1.0F;
  }

 private:
  FrameImage overhead_;
};

CapturedFrame capture_of(FrameImage img, double alpha = 1.0, int truth = 0) {
  CapturedFrame c;
  c.image = std::move(img);
  c.blend_alpha = alpha;
  c.tx_index_truth = truth;
  return c;
}

struct Link {
  codec::Bitstream bits;
  channel::TxSchedule schedule;
  std::vector<CapturedFrame> captures;
};

Link simulate(const std::string& text, std::uint64_t seed, const channel::ChannelParams& params,
              int period = 10) {
  const codec::CodecConfig cfg;
  Link l;
  l.bits = codec::Bitstream::from_text(text);
  channel::LinkConfig link;
  link.overhead_period = period;
  l.schedule = channel::build_schedule(codec::segment_stream(l.bits, cfg.capacity(codec::FrameKind::kDataQr1)), link,
                                       cfg, seed);
  channel::ChannelParams p = params;
  p.seed = derive_seed(seed, {9});
  l.captures = channel::capture_stream(l.schedule, p, link.cam_fps);
  return l;
}

RecoverOptions options_for(const codec::Bitstream& truth, int period = 10) {
  RecoverOptions o;
  o.truth_length = truth.size();
  o.truth = truth;
  o.expected_period = static_cast<std::size_t>(period);
  o.record_time = false;
  return o;
}

}  // namespace

TEST_CASE("dedup collapses runs of identical captures") {
  const FrameImage img = codec::base_frame(codec::FrameKind::kDataQr1, codec::CodecConfig{});
  std::vector<CapturedFrame> caps(60, capture_of(img));
  CHECK(dedup_stream(caps).size() == 1);
  CHECK(dedup_stream({}).empty());
}

TEST_CASE("dedup keeps every frame of an alternating stream") {
  std::vector<CapturedFrame> caps;
  for (int i = 0; i < 20; ++i) caps.push_back(capture_of(FrameImage(10, 10, i % 2 ? 1.0F : 0.0F)));
  CHECK(dedup_stream(caps).size() == 20);
}

TEST_CASE("dedup keeps the least blended capture of each run") {
  const FrameImage a(10, 10, 0.2F);
  std::vector<CapturedFrame> caps{capture_of(a, 0.6), capture_of(a, 1.0, 7), capture_of(a, 0.9)};
  const auto kept = dedup_stream(caps);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].tx_index_truth == 7);
}

TEST_CASE("dedup folds a boundary blend into the nearer neighbour's run") {
  const FrameImage a(10, 10, 0.0F);
  const FrameImage b(10, 10, 1.0F);
  FrameImage mix(10, 10, 0.3F);  // 0.7 a + 0.3 b
  std::vector<CapturedFrame> caps{capture_of(a), capture_of(a), capture_of(mix, 0.7), capture_of(b, 1.0, 1),
                                  capture_of(b, 1.0, 1)};
  const auto kept = dedup_stream(caps);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].image == a);
  CHECK(kept[1].image == b);
}

TEST_CASE("default link deduplicates to one capture per Tx entry") {
  const std::string text = test::random_latin1_text(10 * 433 / 8, 3);
  for (double noise : {0.0, 0.02}) {
    channel::ChannelParams p;
    p.noise_sigma = noise;
    const Link l = simulate(text, 4, p);
    REQUIRE(l.schedule.entries.size() == 11);
    const auto kept = dedup_stream(l.captures);
    REQUIRE(kept.size() == 11);
    for (int k = 0; k < 11; ++k) CHECK(kept[static_cast<std::size_t>(k)].tx_index_truth == k);
    // Idempotence
    const auto again = dedup_stream(kept);
    REQUIRE(again.size() == kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) CHECK(again[i].sample_index == kept[i].sample_index);
  }
}

TEST_CASE("dedup threshold must be non-negative") {
  CHECK_THROWS_AS((void)dedup_stream({capture_of(FrameImage(2, 2))}, -1.0), Error);
}

TEST_CASE("detect_overhead with a perfect classifier") {
  const codec::CodecConfig cfg;
  const OracleClassifier oracle(cfg);
  std::vector<CapturedFrame> overheads(5, capture_of(codec::make_overhead_frame(cfg)));
  CHECK(detect_overhead(overheads, oracle).overhead_indices == std::vector<std::size_t>{0, 1, 2, 3, 4});
  std::vector<CapturedFrame> data(5, capture_of(codec::base_frame(codec::FrameKind::kDataQr2, cfg)));
  CHECK(detect_overhead(data, oracle).overhead_indices.empty());
}

TEST_CASE("model classifier rejects frames of the wrong size") {
  const cnn::Model m(cnn::ModelSpec::reduced());
  const ModelClassifier c(m);
  try {
    (void)c.data_probability(FrameImage(100, 100));
    FAIL("expected contract violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kContract);
  }
  CHECK(c.data_probability(FrameImage(8, 8)) == 0.5F);
}

TEST_CASE("perfect channel recovers the transmitted bits") {
  const codec::CodecConfig cfg;
  const std::string text = test::random_latin1_text(10 * 433 / 8, 5);
  const Link l = simulate(text, 6, channel::ChannelParams::identity());
  const auto kept = dedup_stream(l.captures);
  const auto det = detect_overhead(kept, OracleClassifier(cfg));
  CHECK(det.overhead_indices == std::vector<std::size_t>{0});
  const SyncReport r = align_and_recover(kept, det.overhead_indices, cfg, options_for(l.bits));
  CHECK(r.locked);
  CHECK(r.bit_errors == 0u);
  CHECK(r.recovered_bits == l.bits);
  CHECK(r.recovered_bits.to_text() == text);
  CHECK(r.data_frames_decoded == 10);
  CHECK_FALSE(r.gain.has_value());  // timing disabled
}

TEST_CASE("frames before the first overhead are not recovered") {
  const codec::CodecConfig cfg;
  const codec::Bitstream bits = test::random_bits(3 * 433, 8);
  std::vector<CapturedFrame> frames;
  // A stray data frame, then overhead, then three data frames.
  frames.push_back(capture_of(codec::encode_frame({test::random_bits(433, 99), codec::FrameKind::kDataQr1}, cfg)));
  frames.push_back(capture_of(codec::make_overhead_frame(cfg)));
  for (const auto& p : codec::segment_stream(bits, 433)) frames.push_back(capture_of(codec::encode_frame(p, cfg)));
  const SyncReport r = align_and_recover(frames, {1}, cfg, options_for(bits));
  CHECK(r.recovered_bits == bits);
  CHECK(r.data_frames_decoded == 3);
}

TEST_CASE("no overhead means no lock and no bits") {
  const codec::CodecConfig cfg;
  std::vector<CapturedFrame> frames(3, capture_of(codec::base_frame(codec::FrameKind::kDataQr1, cfg)));
  const SyncReport r = align_and_recover(frames, {}, cfg, options_for(test::random_bits(100, 1)));
  CHECK_FALSE(r.locked);
  CHECK(r.recovered_bits.empty());
  CHECK(r.bit_errors == 100u);
  CHECK(r.to_csv() == "locked,overhead_indices,bits_recovered,bit_errors,T_ms,T_cnn_ms,gain\n0,,0,100,0,0,na\n");
}

TEST_CASE("recovered length does not depend on how many overheads were inserted") {
  const codec::CodecConfig cfg;
  const std::string text = test::random_latin1_text(12 * 433 / 8, 10);
  std::size_t reference = 0;
  for (int period : {1, 3, 10, 12}) {
    const Link l = simulate(text, 11, channel::ChannelParams::identity(), period);
    const auto kept = dedup_stream(l.captures);
    const auto det = detect_overhead(kept, OracleClassifier(cfg));
    RecoverOptions o = options_for(l.bits, period);
    o.truth_length = 0;  // keep the padding so the raw count is visible
    const SyncReport r = align_and_recover(kept, det.overhead_indices, cfg, o);
    CHECK(r.irregular_groups == 0);
    if (reference == 0) reference = r.recovered_bits.size();
    CHECK(r.recovered_bits.size() == reference);
    CHECK(r.recovered_bits.slice(0, l.bits.size()) == l.bits);
  }
  CHECK(reference == 12 * 433);
}

TEST_CASE("noise-free link is the identity on text") {
  const codec::CodecConfig cfg;
  const OracleClassifier oracle(cfg);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::string text = test::random_latin1_text(1 + (seed * 53) % 160, seed);
    const Link l = simulate(text, seed, channel::ChannelParams::identity());
    const auto kept = dedup_stream(l.captures);
    const auto det = detect_overhead(kept, oracle);
    const SyncReport r = align_and_recover(kept, det.overhead_indices, cfg, options_for(l.bits));
    REQUIRE(r.locked);
    CHECK(r.recovered_bits.to_text() == text);
  }
}

TEST_CASE("reported gain follows the measured times") {
  const codec::CodecConfig cfg;
  const Link l = simulate("hello", 2, channel::ChannelParams::identity());
  const auto kept = dedup_stream(l.captures);
  RecoverOptions o = options_for(l.bits);
  o.record_time = true;
  o.classify_s = 0.004;
  const SyncReport r = align_and_recover(kept, {0}, cfg, o);
  REQUIRE(r.gain.has_value());
  CHECK(r.T_cnn == 0.004);
  CHECK(r.T >= r.T_cnn);
  CHECK(*r.gain == system_gain(r.T, r.T_cnn));
}

TEST_CASE("system gain") {
  CHECK(system_gain(33.33, 5.0) == doctest::Approx(0.85).epsilon(0.0005));
  CHECK(std::fabs(system_gain(0.03333, 0.005) - 0.85) <= 0.0005);
  CHECK(system_gain(1.0, 0.0) == 1.0);
  CHECK(system_gain(2.5, 2.5) == 0.0);
  try {
    (void)system_gain(1.0, 1.5);
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDomain);
  }
  CHECK_THROWS_AS((void)system_gain(0.0, 0.0), Error);
  CHECK_THROWS_AS((void)system_gain(1.0, -0.1), Error);
  // Bounds and monotonicity over the whole domain.
  Rng rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double T = 1e-3 + u(rng);
    const double a = u(rng) * T;
    const double b = u(rng) * T;
    const double ga = system_gain(T, a);
    CHECK(ga >= 0.0);
    CHECK(ga <= 1.0);
    if (a < b) CHECK(ga >= system_gain(T, b));
  }
}
