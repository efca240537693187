// Copyright 2026 The sim2real-lanes Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: dataset generation, training, evaluation,
// ablation, overlays and reports. Configuration lives in one JSON file
// (see docs/config.md); flags override individual values.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "s2r/data/manifest.hpp"
#include "s2r/detector/evaluate.hpp"
#include "s2r/errors.hpp"
#include "s2r/harness/experiment.hpp"
#include "s2r/harness/visualize.hpp"
#include "s2r/lane/classes.hpp"
#include "s2r/simulanes/carla_bridge.hpp"
#include "s2r/simulanes/generator.hpp"
#include "s2r/simulanes/procedural.hpp"
#include "s2r/uda/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace s2r;

namespace {

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

void write_json(const fs::path& p, const json& j) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

cv::Scalar scalar3(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw ConfigError("expected three per-channel values");
  return {v[0], v[1], v[2]};
}

// ---- generate ----

struct GenerateArgs {
  fs::path config, out;
  std::optional<int> frames;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> maps;
  std::string backend;
  std::optional<std::string> carla_host;
  std::optional<int> carla_port;
};

int cmd_generate(const GenerateArgs& a) {
  json g = json::object();
  if (!a.config.empty()) {
    const auto root = read_json(a.config);
    g = root.value("generate", json::object());
  }
  simulanes::GenerationRequest req;
  std::string backend = "procedural";
  int width = 1280, height = 720;
  double fov = 70.0;
  simulanes::RenderStyle style;
  std::string classes_file;
  try {
    req.total_frames = g.value("frames", req.total_frames);
    if (g.contains("maps")) req.maps = g.at("maps").get<std::vector<std::string>>();
    req.seed = g.value("seed", req.seed);
    req.max_lanes = g.value("max_lanes", req.max_lanes);
    if (g.contains("h_samples")) req.h_samples = g.at("h_samples").get<std::vector<int>>();
    req.capture_interval_s = g.value("capture_interval_s", req.capture_interval_s);
    req.val_fraction = g.value("val_fraction", req.val_fraction);
    req.test_fraction = g.value("test_fraction", req.test_fraction);
    backend = g.value("backend", backend);
    width = g.value("width", width);
    height = g.value("height", height);
    fov = g.value("fov_deg", fov);
    classes_file = g.value("class_mapping", std::string());
    if (g.contains("weather")) {
      const auto& w = g.at("weather");
      auto& p = req.weather;
      p.storms_enabled = w.value("storms_enabled", p.storms_enabled);
      p.storm_rate_per_s = w.value("storm_rate_per_s", p.storm_rate_per_s);
      p.storm_ramp_s = w.value("storm_ramp_s", p.storm_ramp_s);
      p.storm_hold_s = w.value("storm_hold_s", p.storm_hold_s);
      p.sun_amplitude_deg = w.value("sun_amplitude_deg", p.sun_amplitude_deg);
      p.sun_period_s = w.value("sun_period_s", p.sun_period_s);
      p.base_cloudiness = w.value("base_cloudiness", p.base_cloudiness);
    }
    if (g.contains("style")) {
      const auto& s = g.at("style");
      if (s.contains("gain")) style.gain = scalar3(s.at("gain"));
      if (s.contains("bias")) style.bias = scalar3(s.at("bias"));
      style.noise_sigma = s.value("noise_sigma", style.noise_sigma);
    }
    if (g.contains("output_dir")) {
      fs::path p = g.at("output_dir").get<std::string>();
      req.output_dir = p.is_relative() ? a.config.parent_path() / p : p;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad generate section: ") + e.what());
  }
  if (a.frames) req.total_frames = *a.frames;
  if (a.seed) req.seed = *a.seed;
  if (!a.maps.empty()) req.maps = a.maps;
  if (!a.backend.empty()) backend = a.backend;
  if (!a.out.empty()) req.output_dir = a.out;

  const auto classes = classes_file.empty() ? lane::LaneClassMapping::simulanes_default()
                                            : lane::LaneClassMapping::from_file(classes_file);
  std::unique_ptr<simulanes::SimulatorBackend> sim;
  if (backend == "procedural") {
    simulanes::ProceduralOptions opt;
    opt.intrinsics = simulanes::PinholeIntrinsics::from_fov(width, height, fov);
    opt.style = style;
    sim = std::make_unique<simulanes::ProceduralBackend>(opt, classes);
  } else if (backend == "carla") {
    auto ep = simulanes::CarlaEndpoint::from_env();
    if (a.carla_host) ep.host = *a.carla_host;
    if (a.carla_port) ep.port = *a.carla_port;
    sim = std::make_unique<simulanes::CarlaBridgeBackend>(ep, classes);
  } else {
    throw ConfigError("unknown backend '" + backend + "' (procedural or carla)");
  }
  const auto report = simulanes::generate_dataset(*sim, req, classes);
  json summary = {{"manifest", report.manifest_path.string()},
                  {"maps", report.maps},
                  {"frames_per_map", report.frames_per_map},
                  {"respawns", report.respawns},
                  {"flagged_labels", report.flagged_labels}};
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// ---- train ----

struct TrainArgs {
  fs::path config, out;
  std::string strategy;
  std::optional<std::uint64_t> seed;
};

int cmd_train(const TrainArgs& a) {
  auto spec = harness::load_experiment_spec(a.config);
  auto cfg = spec.training;
  cfg.strategy = uda::strategy_from_string(a.strategy);
  cfg.seeds = a.seed ? std::vector<std::uint64_t>{*a.seed} : spec.seeds;
  cfg.validate();
  const auto data = harness::load_experiment_data(spec);
  const auto td = harness::train_data_for(data, cfg.strategy, data.sim);
  const fs::path out = a.out.empty() ? spec.output_dir / uda::to_string(cfg.strategy) : a.out;
  if (out.empty()) throw ConfigError("no output directory (--out or experiment.output_dir)");
  if (a.seed) {
    const auto run = uda::train_seed(cfg, td, *a.seed, out);
    std::cout << json(run.best).dump(2) << '\n';
  } else {
    const auto res = uda::train(cfg, td, out);
    std::cout << json({{"strategy", uda::to_string(res.strategy)},
                       {"val_det_mean", res.det.mean},
                       {"val_det_stddev", res.det.stddev}})
                     .dump(2)
              << '\n';
  }
  return 0;
}

// ---- eval ----

struct EvalArgs {
  fs::path checkpoint, manifest, out;
  std::string split = "test";
  std::string domain = "real";
  int batch = 8;
};

data::Domain domain_from(const std::string& s) {
  if (s == "real") return data::Domain::kReal;
  if (s == "sim") return data::Domain::kSim;
  throw ConfigError("domain must be real or sim");
}

int cmd_eval(const EvalArgs& a) {
  auto model = uda::load_model(a.checkpoint);
  const auto domain = domain_from(a.domain);
  const auto ds = data::load_dataset(
      data::load_manifest(a.manifest, data::split_from_string(a.split)), domain);
  const auto r = detector::evaluate(model.forward(domain), ds, model.config.anchors, a.batch);
  json j = {{"checkpoint", a.checkpoint.string()},
            {"split", a.split},
            {"frames", r.frames},
            {"det_acc", r.det_acc},
            {"cls_acc", r.cls_acc ? json(*r.cls_acc) : json(nullptr)}};
  if (!a.out.empty()) write_json(a.out, j);
  std::cout << j.dump(2) << '\n';
  return 0;
}

// ---- ablate / report ----

int cmd_ablate(const fs::path& config, const fs::path& out) {
  auto spec = harness::load_experiment_spec(config);
  if (!out.empty()) spec.output_dir = out;
  if (spec.output_dir.empty()) throw ConfigError("no output directory (--out or experiment.output_dir)");
  const auto data = harness::load_experiment_data(spec);
  const auto r = harness::run_ablation(spec, data.sim, data.real_train.size(),
                                       harness::default_trainer(data));
  std::cout << harness::markdown_table(r);
  return 0;
}

int cmd_report(const fs::path& config, const fs::path& from, const fs::path& out) {
  harness::AggregateReport r;
  if (!from.empty()) {
    r = harness::reaggregate(harness::report_from_json(read_json(from)));
    if (!out.empty()) {
      write_json(out / "report.json", json(r));
      std::ofstream(out / "report.md") << harness::markdown_table(r);
    }
  } else {
    auto spec = harness::load_experiment_spec(config);
    if (!out.empty()) spec.output_dir = out;
    if (spec.output_dir.empty()) throw ConfigError("no output directory (--out or experiment.output_dir)");
    const auto data = harness::load_experiment_data(spec);
    r = harness::run_experiment(spec, data.sim, harness::default_trainer(data));
  }
  std::cout << harness::markdown_table(r);
  return 0;
}

// ---- visualize ----

struct VisualizeArgs {
  fs::path checkpoint, manifest, out;
  std::string split = "test";
  std::string domain = "real";
  std::size_t limit = 0;
};

int cmd_visualize(const VisualizeArgs& a) {
  auto model = uda::load_model(a.checkpoint);
  const auto domain = domain_from(a.domain);
  const auto ds = data::load_dataset(
      data::load_manifest(a.manifest, data::split_from_string(a.split)), domain);
  const int n = harness::render_predictions(model.forward(domain), ds, model.config.anchors, a.out,
                                            a.limit);
  std::cout << n << " frames written to " << a.out.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sim-to-real lane detection toolkit"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "render a labelled synthetic dataset");
  g->add_option("--config", gen.config, "JSON file with a \"generate\" section");
  g->add_option("--out", gen.out, "output directory");
  g->add_option("--frames", gen.frames, "total frames, divided evenly over the maps");
  g->add_option("--seed", gen.seed);
  g->add_option("--maps", gen.maps, "map names")->delimiter(',');
  g->add_option("--backend", gen.backend, "procedural or carla");
  g->add_option("--carla-host", gen.carla_host, "bridge host (default $SIMLANES_CARLA_HOST)");
  g->add_option("--carla-port", gen.carla_port, "bridge port (default $SIMLANES_CARLA_PORT)");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train one strategy");
  t->add_option("--strategy", tr.strategy,
                "direct|two-stage-unit|two-stage-munit|ada|unit-adv|munit-adv|real")
      ->required();
  t->add_option("--config", tr.config, "experiment JSON")->required();
  t->add_option("--seed", tr.seed, "single seed (default: every seed in the config)");
  t->add_option("--out", tr.out, "run directory");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "evaluate a checkpoint on a labelled split");
  e->add_option("--checkpoint", ev.checkpoint)->required();
  e->add_option("--manifest", ev.manifest)->required();
  e->add_option("--split", ev.split, "train|val|test");
  e->add_option("--domain", ev.domain, "real or sim (generative models pick the encoder)");
  e->add_option("--batch", ev.batch);
  e->add_option("--out", ev.out, "write the metrics JSON here");

  fs::path ab_config, ab_out;
  auto* ab = app.add_subcommand("ablate", "sim dataset size ablation (direct and ada)");
  ab->add_option("--config", ab_config, "experiment JSON")->required();
  ab->add_option("--out", ab_out, "output directory");

  VisualizeArgs vi;
  auto* v = app.add_subcommand("visualize", "draw predicted lanes on frames");
  v->add_option("--checkpoint", vi.checkpoint)->required();
  v->add_option("--manifest", vi.manifest)->required();
  v->add_option("--out", vi.out)->required();
  v->add_option("--split", vi.split);
  v->add_option("--domain", vi.domain);
  v->add_option("--limit", vi.limit, "at most this many frames (0 = all)");

  fs::path rp_config, rp_from, rp_out;
  auto* rp = app.add_subcommand("report", "multi-seed results table");
  auto* rp_cfg = rp->add_option("--config", rp_config, "experiment JSON: train and evaluate");
  auto* rp_src = rp->add_option("--from", rp_from, "stored report.json: re-aggregate only");
  rp_cfg->excludes(rp_src);
  rp->add_option("--out", rp_out, "output directory");

  CLI11_PARSE(app, argc, argv);
  // stdout carries machine-readable results only
  spdlog::set_default_logger(spdlog::stderr_color_mt("s2r"));
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*g) return cmd_generate(gen);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
    if (*ab) return cmd_ablate(ab_config, ab_out);
    if (*v) return cmd_visualize(vi);
    if (*rp) {
      if (rp_config.empty() && rp_from.empty()) throw ConfigError("report needs --config or --from");
      return cmd_report(rp_config, rp_from, rp_out);
    }
  } catch (const ConfigError& ex) {
    spdlog::error("configuration: {}", ex.what());
    return 2;
  } catch (const std::exception& ex) {
    spdlog::error("{}", ex.what());
    return 1;
  }
  return 0;
}
