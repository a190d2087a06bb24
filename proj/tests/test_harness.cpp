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
#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "s2c/error.hpp"
#include "s2c/harness.hpp"
#include "s2c/random.hpp"
#include "test_util.hpp"

using namespace s2c;
using namespace s2c::harness;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Metrics with_fields(double p, double r, double f, double a) {
  Metrics m;
  m.precision = p;
  m.recall = r;
  m.f1 = f;
  m.accuracy = a;
  return m;
}

HarnessConfig tiny_config(std::uint64_t seed) {
  HarnessConfig cfg;
  cfg.seed = seed;
  cfg.dataset.seed = seed;
  cfg.dataset.per_class_count = 10;
  cfg.epochs = 1;
  cfg.batch_size = 8;
  cfg.record_time = false;
  return cfg;
}

}  // namespace

TEST_CASE("confusion matrix worked examples") {
  const std::vector<int> labels{1, 1, 0, 0};
  CHECK(confusion(labels, std::vector<int>{1, 0, 0, 1}) == ConfusionMatrix{1, 1, 1, 1});
  CHECK(confusion(labels, labels) == ConfusionMatrix{2, 0, 0, 2});
  CHECK(confusion(labels, std::vector<int>{0, 0, 1, 1}) == ConfusionMatrix{0, 2, 2, 0});
  try {
    (void)confusion(labels, std::vector<int>{1});
    FAIL("expected shape error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kShape);
  }
}

TEST_CASE("metrics from a confusion matrix") {
  CHECK(metrics({5, 0, 0, 5}) == with_fields(1, 1, 1, 1));
  const Metrics m = metrics({99, 1, 1, 99});
  CHECK(m.precision == doctest::Approx(0.99));
  CHECK(m.recall == doctest::Approx(0.99));
  CHECK(m.f1 == doctest::Approx(0.99));
  CHECK(m.accuracy == doctest::Approx(0.99));
  CHECK_FALSE(m.degenerate);

  // No predicted positives: precision has a zero denominator.
  const Metrics d = metrics({0, 0, 3, 7});
  CHECK(d.degenerate);
  CHECK(d.precision == 0.0);
  CHECK(d.f1 == 0.0);
  CHECK(d.accuracy == doctest::Approx(0.7));
  CHECK_THROWS_AS((void)metrics({}), Error);
}

TEST_CASE("f1 is the harmonic mean of precision and recall") {
  // Table row with precision 0.980 and recall 0.986.
  const double p = 0.980;
  const double r = 0.986;
  CHECK(1.0 / (0.5 / p + 0.5 / r) == doctest::Approx(0.982991).epsilon(1e-6));
  // The same identity through the integer pipeline.
  const Metrics m = metrics({98, 2, 1, 99});
  CHECK(m.f1 == doctest::Approx(2.0 * m.precision * m.recall / (m.precision + m.recall)));
}

TEST_CASE("macro average of the published per-experiment rows") {
  const std::vector<Metrics> rows{with_fields(0.980, 0.986, 0.985, 98.60), with_fields(0.990, 0.996, 0.993, 99.60),
                                  with_fields(0.960, 0.980, 0.970, 98.00)};
  const Metrics avg = macro_average(rows);
  CHECK(std::fabs(avg.precision - 0.97667) < 5e-6);
  CHECK(std::fabs(avg.recall - 0.98733) < 5e-6);
  CHECK(std::fabs(avg.accuracy - 98.7333) < 5e-5);

  const std::vector<Metrics> one{rows[1]};
  CHECK(macro_average(one) == rows[1]);
  CHECK_THROWS_AS((void)macro_average(std::vector<Metrics>{}), Error);
}

TEST_CASE("macro average is permutation invariant") {
  Rng rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Metrics> rows;
    for (int i = 0; i < 5; ++i) rows.push_back(with_fields(u(rng), u(rng), u(rng), u(rng)));
    const Metrics ref = macro_average(rows);
    std::shuffle(rows.begin(), rows.end(), rng);
    CHECK(macro_average(rows) == ref);
  }
}

TEST_CASE("metrics identities on random confusion matrices") {
  Rng rng(5);
  std::uniform_int_distribution<std::size_t> count(0, 50);
  for (int trial = 0; trial < 1000; ++trial) {
    const ConfusionMatrix cm{count(rng), count(rng), count(rng), count(rng) + 1};
    const Metrics m = metrics(cm);
    const double n = static_cast<double>(cm.total());
    CHECK(m.accuracy == doctest::Approx(static_cast<double>(cm.tp + cm.tn) / n));
    for (double v : {m.precision, m.recall, m.f1, m.accuracy}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    if (cm.tp + cm.fp > 0 && cm.tp + cm.fn > 0) {
      CHECK(m.precision == doctest::Approx(double(cm.tp) / double(cm.tp + cm.fp)));
      CHECK(m.recall == doctest::Approx(double(cm.tp) / double(cm.tp + cm.fn)));
      if (m.precision + m.recall > 0)
        CHECK(m.f1 == doctest::Approx(2 * m.precision * m.recall / (m.precision + m.recall)));
      // F1 lies between the smaller of the two and their mean.
      CHECK(m.f1 <= (m.precision + m.recall) / 2 + 1e-12);
      CHECK(m.f1 >= std::min(m.precision, m.recall) - 1e-12);
    } else {
      CHECK(m.degenerate);
    }
  }
}

TEST_CASE("harness config round trips through key=value text") {
  HarnessConfig cfg;
  cfg.seed = 77;
  cfg.dataset.seed = 77;
  cfg.dataset.per_class_count = 123;
  cfg.epochs = 3;
  cfg.lr = 0.0025;
  cfg.link.overhead_period = 7;
  cfg.link_channel.noise_sigma = 0.01;
  cfg.record_time = false;
  cfg.dataset_cache = "/tmp/somewhere";
  const KvConfig kv = cfg.to_kv();
  const HarnessConfig back = HarnessConfig::from_kv(KvConfig::parse(kv.to_text()));
  CHECK(back.to_kv().to_text() == kv.to_text());
  CHECK(back.seed == 77);
  CHECK(back.dataset.seed == 77);
  CHECK(back.dataset.per_class_count == 123);
  CHECK(back.link.overhead_period == 7);
  CHECK_FALSE(back.record_time);
}

TEST_CASE("harness config rejects unknown keys and bad values") {
  KvConfig kv = HarnessConfig{}.to_kv();
  kv.set("epochz", "3");
  try {
    (void)HarnessConfig::from_kv(kv);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
  }
  KvConfig bad = HarnessConfig{}.to_kv();
  bad.set("batch_size", "0");
  CHECK_THROWS_AS((void)HarnessConfig::from_kv(bad), Error);
  KvConfig clock = HarnessConfig{}.to_kv();
  clock.set("clock", "sundial");
  CHECK_THROWS_AS((void)HarnessConfig::from_kv(clock), Error);
}

TEST_CASE("derived seeds differ per stream and follow the master seed") {
  const HarnessConfig a = tiny_config(1);
  const HarnessConfig b = tiny_config(2);
  CHECK(a.split_seed() != a.link_seed());
  CHECK(a.train_seed(data::ExperimentId::kEx1) != a.train_seed(data::ExperimentId::kEx2));
  CHECK(a.split_seed() != b.split_seed());
  CHECK(a.train_seed(data::ExperimentId::kEx3) == tiny_config(1).train_seed(data::ExperimentId::kEx3));
}

TEST_CASE("experiment runs are byte-reproducible and replay from their config snapshot") {
  const auto root = test::scratch_dir("harness_experiment");
  const HarnessConfig cfg = tiny_config(3);
  const auto [ra, ma] = run_experiment(data::ExperimentId::kEx1, cfg, root / "cache", root / "a");
  const auto [rb, mb] = run_experiment(data::ExperimentId::kEx1, cfg, root / "cache", root / "b");
  for (const char* f : {"config.txt", "weights.s2cw", "train_report.csv", "metrics.csv"}) {
    CAPTURE(f);
    REQUIRE(std::filesystem::exists(root / "a" / f));
    CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
  }
  CHECK(ra.cm == rb.cm);
  CHECK(ra.cm.total() == 4);  // 2 classes x (10 - 6 train - 2 val)

  // Rebuild the run purely from the written snapshot.
  const HarnessConfig replay = HarnessConfig::from_kv(KvConfig::load(root / "a" / "config.txt"));
  const auto [rc, mc] = run_experiment(data::ExperimentId::kEx1, replay, root / "cache", root / "c");
  CHECK(slurp(root / "a" / "weights.s2cw") == slurp(root / "c" / "weights.s2cw"));
  CHECK(slurp(root / "a" / "metrics.csv") == slurp(root / "c" / "metrics.csv"));

  // Evaluating the returned model reproduces the reported confusion matrix.
  CHECK(evaluate_experiment(data::ExperimentId::kEx1, ma, cfg, root / "cache").cm == ra.cm);
}

TEST_CASE("summary table has one row per experiment plus the average") {
  ExperimentReport a;
  a.id = data::ExperimentId::kEx1;
  a.metrics = with_fields(1, 1, 1, 1);
  ExperimentReport b;
  b.id = data::ExperimentId::kEx2;
  b.metrics = with_fields(0.5, 0.5, 0.5, 0.5);
  const std::string csv = summary_csv({a, b});
  std::istringstream in(csv);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 4);
  CHECK(lines[1].rfind("ex1,", 0) == 0);
  CHECK(lines[2].rfind("ex2,", 0) == 0);
  CHECK(lines[3].rfind("average,0.75,0.75,0.75,0.75", 0) == 0);
}

TEST_CASE("link text is deterministic and exactly sized") {
  CHECK(make_link_text(541, 4) == make_link_text(541, 4));
  CHECK(make_link_text(541, 4) != make_link_text(541, 5));
  CHECK(make_link_text(541, 4).size() == 541);
  CHECK(make_link_text(1, 4).size() == 1);
}

TEST_CASE("link benchmark plumbing on an undistorted channel") {
  HarnessConfig cfg = tiny_config(4);
  cfg.link_channel = channel::ChannelParams::identity();
  cfg.record_time = true;
  const cnn::Model model = cnn::Model::initialized(cfg.model_spec(), 9);
  const std::string text = make_link_text(20 * 433 / 8, 1);
  const auto root = test::scratch_dir("harness_link");
  const LinkResult r = run_link_benchmark(cfg, model, text, 5, root);
  CHECK(r.tx_entries == 22);
  CHECK(r.deduplicated == 22);
  CHECK(r.true_overhead_indices == std::vector<std::size_t>{0, 11});
  CHECK(r.bits_sent == text.size() * 8);
  CHECK(std::filesystem::exists(root / "sync_report.csv"));
  CHECK(std::filesystem::exists(root / "link_summary.csv"));
  if (r.report.gain) CHECK(*r.report.gain == sync::system_gain(r.report.T, r.report.T_cnn));
  if (!r.report.locked) CHECK(r.bit_error_rate() == 1.0);
}
