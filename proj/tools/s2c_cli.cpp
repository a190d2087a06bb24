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
// Command-line front end: dataset generation, training, evaluation and the
// simulated screen-to-camera link.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "s2c/cnn.hpp"
#include "s2c/dataset.hpp"
#include "s2c/error.hpp"
#include "s2c/harness.hpp"
#include "s2c/kv_config.hpp"

namespace fs = std::filesystem;
using namespace s2c;

namespace {

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  std::string out_dir = "s2c_out";
  std::vector<std::string> overrides;
};

harness::HarnessConfig resolve_config(const GlobalOptions& g) {
  KvConfig kv;
  if (!g.config_path.empty()) kv = KvConfig::load(g.config_path);
  for (const std::string& item : g.overrides) {
    const auto eq = item.find('=');
    require(eq != std::string::npos && eq > 0, ErrorCode::kConfig, "--set expects key=value, got '" + item + "'");
    kv.set(item.substr(0, eq), item.substr(eq + 1));
  }
  if (g.seed) kv.set("seed", std::to_string(*g.seed));
  return harness::HarnessConfig::from_kv(kv);
}

fs::path cache_dir(const harness::HarnessConfig& cfg, const fs::path& out) {
  return cfg.dataset_cache.empty() ? out / "datasets" : fs::path(cfg.dataset_cache);
}

void prepare_out(const fs::path& out, const harness::HarnessConfig& cfg) {
  std::error_code ec;
  fs::create_directories(out, ec);
  require(!ec && fs::is_directory(out), ErrorCode::kIo, "cannot create output directory " + out.string());
  cfg.to_kv().save(out / "config.txt");
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), ErrorCode::kIo, "cannot write " + path.string());
  f << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

std::string link_text(const harness::HarnessConfig& cfg, const std::string& text_file) {
  if (!text_file.empty()) return read_file(text_file);
  const std::size_t chars = cfg.link_data_frames * cfg.dataset.codec.capacity(codec::FrameKind::kDataQr1) / 8;
  return harness::make_link_text(chars, cfg.link_seed());
}

void print_metrics(const harness::ExperimentReport& r) {
  std::printf("%s precision=%.4f recall=%.4f f1=%.4f accuracy=%.4f\n", std::string(data::experiment_name(r.id)).c_str(),
              r.metrics.precision, r.metrics.recall, r.metrics.f1, r.metrics.accuracy);
}

void print_link(const harness::LinkResult& r) {
  std::printf("link locked=%d overhead_exact=%d bit_errors=%s ber=%.6g captures=%zu deduplicated=%zu\n",
              r.report.locked ? 1 : 0, r.overhead_exact() ? 1 : 0,
              r.report.bit_errors ? std::to_string(*r.report.bit_errors).c_str() : "na", r.bit_error_rate(),
              r.captures, r.deduplicated);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screen-to-camera link simulator with CNN frame classification"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Master seed (overrides the config file)");
  app.add_option("--config", g.config_path, "Flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--set", g.overrides, "Config override key=value (repeatable)");

  auto* gen = app.add_subcommand("generate-dataset", "Render and augment the labelled frame dataset");

  std::string experiment;
  auto* train = app.add_subcommand("train", "Train the classifier for one experiment");
  train->add_option("--experiment", experiment, "ex1, ex2 or ex3")
      ->required()
      ->check(CLI::IsMember({"ex1", "ex2", "ex3"}));

  std::string weights;
  auto* eval = app.add_subcommand("eval", "Score saved weights on an experiment's test split");
  eval->add_option("--experiment", experiment, "ex1, ex2 or ex3")
      ->required()
      ->check(CLI::IsMember({"ex1", "ex2", "ex3"}));
  eval->add_option("--weights", weights, "Weight file")->required()->check(CLI::ExistingFile);

  std::string text_file;
  auto* link = app.add_subcommand("simulate-link", "Simulate the link end to end with a trained ex3 model");
  link->add_option("--weights", weights, "ex3 weight file")->required()->check(CLI::ExistingFile);
  link->add_option("--text-file", text_file, "Message to send (default: generated text)");

  auto* all = app.add_subcommand("benchmark-all", "Run ex1-ex3 and the link benchmark");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg) {
      if (c == '\n') c = ' ';
    }
    std::fprintf(stderr, "error: code=usage message=%s\n", msg.c_str());
    return 2;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    const harness::HarnessConfig cfg = resolve_config(g);
    const fs::path out = g.out_dir;
    prepare_out(out, cfg);

    if (gen->parsed()) {
      const auto manifest = harness::prepare_dataset(cfg, cache_dir(cfg, out));
      manifest.save(out / "split_manifest.csv");
      std::printf("dataset root=%s images=%zu train=%zu val=%zu test=%zu\n", manifest.root.string().c_str(),
                  manifest.records.size(), manifest.count(data::Split::kTrain), manifest.count(data::Split::kVal),
                  manifest.count(data::Split::kTest));
    } else if (train->parsed()) {
      const auto id = data::experiment_from_name(experiment);
      const auto [report, model] = harness::run_experiment(id, cfg, cache_dir(cfg, out), out);
      print_metrics(report);
    } else if (eval->parsed()) {
      const auto id = data::experiment_from_name(experiment);
      const cnn::Model model = cnn::load_weights(weights, cfg.model_spec());
      const auto report = harness::evaluate_experiment(id, model, cfg, cache_dir(cfg, out));
      write_file(out / "metrics.csv", report.metrics_csv());
      print_metrics(report);
    } else if (link->parsed()) {
      const cnn::Model model = cnn::load_weights(weights, cfg.model_spec());
      const auto result = harness::run_link_benchmark(cfg, model, link_text(cfg, text_file), cfg.link_seed(), out);
      print_link(result);
      if (!result.report.locked) {
        std::fprintf(stderr, "error: code=no_lock message=no overhead frame was detected\n");
        return 3;
      }
    } else if (all->parsed()) {
      std::vector<harness::ExperimentReport> reports;
      std::optional<cnn::Model> ex3;
      for (auto id : {data::ExperimentId::kEx1, data::ExperimentId::kEx2, data::ExperimentId::kEx3}) {
        auto [report, model] =
            harness::run_experiment(id, cfg, cache_dir(cfg, out), out / std::string(data::experiment_name(id)));
        print_metrics(report);
        reports.push_back(std::move(report));
        if (id == data::ExperimentId::kEx3) ex3 = std::move(model);
      }
      write_file(out / "summary.csv", harness::summary_csv(reports));
      const auto result = harness::run_link_benchmark(cfg, *ex3, link_text(cfg, text_file), cfg.link_seed(),
                                                      out / "link");
      print_link(result);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: code=%s message=%s\n", std::string(to_string(e.code())).c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: code=internal message=%s\n", e.what());
    return 1;
  }
  return 0;
}
