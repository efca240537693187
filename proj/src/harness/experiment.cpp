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

#include "s2r/harness/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <opencv2/imgcodecs.hpp>
#include <spdlog/spdlog.h>

#include "s2r/data/batching.hpp"
#include "s2r/data/manifest.hpp"
#include "s2r/errors.hpp"
#include "s2r/harness/plot.hpp"

namespace s2r::harness {

namespace fs = std::filesystem;
using nlohmann::json;
using uda::Strategy;

namespace {

constexpr std::uint64_t kAblationStream = 0xab1a;

json seed_json(const SeedOutcome& s) {
  json j = {{"seed", s.seed}, {"ok", s.ok}};
  if (s.ok) {
    j["det_acc"] = s.det_acc;
    j["cls_acc"] = s.cls_acc ? json(*s.cls_acc) : json(nullptr);
    j["checkpoint"] = s.checkpoint.string();
  } else {
    j["error"] = s.error;
  }
  return j;
}

SeedOutcome seed_from_json(const json& j) {
  SeedOutcome s;
  s.seed = j.at("seed");
  s.ok = j.at("ok");
  if (s.ok) {
    s.det_acc = j.at("det_acc");
    if (!j.at("cls_acc").is_null()) s.cls_acc = j.at("cls_acc").get<double>();
    s.checkpoint = j.value("checkpoint", std::string());
  } else {
    s.error = j.value("error", std::string());
  }
  return s;
}

json strategy_json(const StrategyReport& r) {
  json seeds = json::array();
  for (const auto& s : r.seeds) seeds.push_back(seed_json(s));
  return {{"strategy", uda::to_string(r.strategy)},
          {"seeds", seeds},
          {"det_mean", r.det.mean},
          {"det_stddev", r.det.stddev},
          {"cls_mean", r.cls.mean},
          {"cls_stddev", r.cls.stddev},
          {"cls_seeds", r.cls.n},
          {"failures", r.failures}};
}

StrategyReport strategy_from_json(const json& j) {
  StrategyReport r;
  r.strategy = uda::strategy_from_string(j.at("strategy"));
  for (const auto& s : j.at("seeds")) r.seeds.push_back(seed_from_json(s));
  r.det = {j.at("det_mean"), j.at("det_stddev"), 0};
  r.cls = {j.at("cls_mean"), j.at("cls_stddev"), j.value("cls_seeds", std::size_t{0})};
  for (const auto& s : r.seeds) r.det.n += s.ok;
  r.failures = j.value("failures", std::size_t{0});
  return r;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

data::Dataset load_split(const fs::path& manifest, data::Split split, data::Domain domain,
                         bool require) {
  const auto splits = data::manifest_splits(manifest);
  if (std::find(splits.begin(), splits.end(), split) == splits.end()) {
    if (require) {
      throw ConfigError(fmt::format("{} has no {} split", manifest.string(), data::to_string(split)));
    }
    return {};
  }
  return data::load_dataset(data::load_manifest(manifest, split), domain,
                            {.require_labels = domain == data::Domain::kSim, .strip_labels = false});
}

}  // namespace

void to_json(json& j, const AggregateReport& r) {
  j = json::object();
  j["stddev"] = "population (divisor n)";
  j["units"] = "percent";
  j["strategies"] = json::array();
  for (const auto& s : r.strategies) j["strategies"].push_back(strategy_json(s));
  j["ablation"] = json::array();
  for (const auto& c : r.ablation) {
    json points = json::array();
    for (const auto& p : c.points) {
      points.push_back({{"multiplier", p.multiplier},
                        {"sim_frames", p.sim_frames},
                        {"result", strategy_json(p.result)}});
    }
    j["ablation"].push_back({{"strategy", uda::to_string(c.strategy)}, {"points", points}});
  }
}

AggregateReport report_from_json(const json& j) {
  try {
    AggregateReport r;
    for (const auto& s : j.at("strategies")) r.strategies.push_back(strategy_from_json(s));
    for (const auto& c : j.value("ablation", json::array())) {
      AblationCurve curve;
      curve.strategy = uda::strategy_from_string(c.at("strategy"));
      for (const auto& p : c.at("points")) {
        curve.points.push_back({p.at("multiplier"), p.at("sim_frames"),
                                strategy_from_json(p.at("result"))});
      }
      r.ablation.push_back(std::move(curve));
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad report: ") + e.what(), 0);
  }
}

StrategyReport summarize_outcomes(Strategy s, std::vector<SeedOutcome> outcomes) {
  StrategyReport r;
  r.strategy = s;
  std::vector<double> det, cls;
  for (const auto& o : outcomes) {
    if (!o.ok) {
      ++r.failures;
      continue;
    }
    det.push_back(o.det_acc);
    if (o.cls_acc) cls.push_back(*o.cls_acc);
  }
  r.det = uda::summarize(det);
  r.cls = uda::summarize(cls);
  r.seeds = std::move(outcomes);
  return r;
}

AggregateReport reaggregate(const AggregateReport& stored) {
  AggregateReport r;
  for (const auto& s : stored.strategies) r.strategies.push_back(summarize_outcomes(s.strategy, s.seeds));
  for (const auto& c : stored.ablation) {
    AblationCurve curve{c.strategy, {}};
    for (const auto& p : c.points) {
      curve.points.push_back({p.multiplier, p.sim_frames, summarize_outcomes(c.strategy, p.result.seeds)});
    }
    r.ablation.push_back(std::move(curve));
  }
  return r;
}

std::string markdown_table(const AggregateReport& r) {
  std::ostringstream out;
  out << "Mean and population standard deviation (divisor n) over seeds, in percent.\n"
         "Det-Acc on the test split, Cls-Acc on the validation split.\n\n";
  out << "| Strategy | Det-Acc | Cls-Acc | Seeds | Failed |\n|---|---|---|---|---|\n";
  auto cell = [](const uda::Summary& s) {
    return s.n == 0 ? std::string("n/a") : fmt::format("{:.2f} ± {:.2f}", s.mean, s.stddev);
  };
  for (const auto& s : r.strategies) {
    out << fmt::format("| {} | {} | {} | {} | {} |\n", uda::to_string(s.strategy), cell(s.det),
                       cell(s.cls), s.seeds.size(), s.failures);
  }
  if (!r.ablation.empty()) {
    out << "\n| Strategy | Multiplier | Sim frames | Det-Acc | Cls-Acc | Failed |\n"
           "|---|---|---|---|---|---|\n";
    for (const auto& c : r.ablation) {
      for (const auto& p : c.points) {
        out << fmt::format("| {} | {}x | {} | {} | {} | {} |\n", uda::to_string(c.strategy),
                           p.multiplier, p.sim_frames, cell(p.result.det), cell(p.result.cls),
                           p.result.failures);
      }
    }
  }
  return out.str();
}

void ExperimentSpec::validate() const {
  if (strategies.empty()) throw ConfigError("no strategies to run");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (multipliers.empty()) throw ConfigError("no ablation multipliers");
  for (int m : multipliers) {
    if (m < 1) throw ConfigError("ablation multipliers must be positive integers");
  }
  training.validate();
}

ExperimentSpec experiment_spec_from_json(const json& j, const fs::path& base_dir) {
  ExperimentSpec s;
  try {
    if (j.contains("training")) s.training = uda::strategy_config_from_json(j.at("training"));
    const auto& e = j.contains("experiment") ? j.at("experiment") : json::object();
    if (e.contains("strategies")) {
      s.strategies.clear();
      for (const auto& name : e.at("strategies")) s.strategies.push_back(uda::strategy_from_string(name));
    }
    if (e.contains("seeds")) {
      s.seeds = e.at("seeds").get<std::vector<std::uint64_t>>();
    } else if (j.contains("training") && j.at("training").contains("seeds")) {
      s.seeds = s.training.seeds;
    }
    if (e.contains("multipliers")) s.multipliers = e.at("multipliers").get<std::vector<int>>();
    auto path = [&](const char* key) -> fs::path {
      if (!e.contains(key)) return {};
      fs::path p = e.at(key).get<std::string>();
      return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    };
    s.sim_manifest = path("sim_manifest");
    s.real_manifest = path("real_manifest");
    s.output_dir = path("output_dir");
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("bad experiment config: ") + ex.what());
  }
  s.validate();
  return s;
}

ExperimentSpec load_experiment_spec(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return experiment_spec_from_json(j, file.parent_path());
}

ExperimentData load_experiment_data(const ExperimentSpec& spec) {
  if (spec.sim_manifest.empty() || spec.real_manifest.empty()) {
    throw ConfigError("sim_manifest and real_manifest are required");
  }
  ExperimentData d;
  d.sim = load_split(spec.sim_manifest, data::Split::kTrain, data::Domain::kSim, true);
  d.sim_val = load_split(spec.sim_manifest, data::Split::kVal, data::Domain::kSim, false);
  d.real_train = load_split(spec.real_manifest, data::Split::kTrain, data::Domain::kReal, true);
  d.real_val = load_split(spec.real_manifest, data::Split::kVal, data::Domain::kReal, true);
  d.real_test = load_split(spec.real_manifest, data::Split::kTest, data::Domain::kReal, true);
  return d;
}

uda::TrainData train_data_for(const ExperimentData& data, Strategy strategy,
                              const data::Dataset& sim) {
  uda::TrainData td;
  td.sim = sim;
  td.real = data.real_train;
  if (strategy != Strategy::kSupervisedReal) {
    for (auto& f : td.real.samples) f.label.reset();
  }
  td.val = data.real_val;
  td.sim_heldout = data.sim_val;
  return td;
}

SeedTrainer default_trainer(const ExperimentData& data) {
  return [&data](const uda::StrategyConfig& cfg, const data::Dataset& sim, std::uint64_t seed,
                 const fs::path& out) {
    const auto run = uda::train_seed(cfg, train_data_for(data, cfg.strategy, sim), seed, out);
    auto model = uda::load_model(run.best.checkpoint);
    const auto test = detector::evaluate(model.forward(), data.real_test, model.config.anchors,
                                         cfg.eval_batch);
    SeedOutcome o;
    o.seed = seed;
    o.ok = true;
    o.det_acc = 100.0 * test.det_acc;
    if (run.best.val_cls_acc) o.cls_acc = 100.0 * *run.best.val_cls_acc;
    o.checkpoint = run.best.checkpoint;
    return o;
  };
}

namespace {

StrategyReport run_seeds(const ExperimentSpec& spec, Strategy s, const data::Dataset& sim,
                         const fs::path& dir, const SeedTrainer& trainer,
                         std::size_t epoch_samples = 0) {
  auto cfg = spec.training;
  cfg.strategy = s;
  cfg.seeds = spec.seeds;
  cfg.epoch_samples = epoch_samples;
  std::vector<SeedOutcome> outcomes;
  for (auto seed : spec.seeds) {
    SeedOutcome o;
    try {
      o = trainer(cfg, sim, seed, dir / fmt::format("seed_{}", seed));
      o.seed = seed;
    } catch (const std::exception& e) {
      spdlog::error("{} seed {} failed: {}", uda::to_string(s), seed, e.what());
      o = SeedOutcome{};
      o.seed = seed;
      o.ok = false;
      o.error = e.what();
    }
    outcomes.push_back(std::move(o));
  }
  return summarize_outcomes(s, std::move(outcomes));
}

void write_report(const fs::path& dir, const std::string& stem, const AggregateReport& r) {
  fs::create_directories(dir);
  write_text(dir / (stem + ".json"), json(r).dump(2) + "\n");
  write_text(dir / (stem + ".md"), markdown_table(r));
}

}  // namespace

AggregateReport run_experiment(const ExperimentSpec& spec, const data::Dataset& sim,
                               const SeedTrainer& trainer) {
  spec.validate();
  AggregateReport report;
  for (auto s : spec.strategies) {
    report.strategies.push_back(run_seeds(spec, s, sim, spec.output_dir / uda::to_string(s), trainer));
  }
  if (!spec.output_dir.empty()) write_report(spec.output_dir, "report", report);
  return report;
}

std::vector<std::size_t> ablation_subset(std::size_t full_size, std::size_t subset_size,
                                         int multiplier, std::uint64_t seed) {
  if (subset_size > full_size) {
    throw ConfigError(fmt::format("ablation subset of {} frames needs more than the {} available",
                                  subset_size, full_size));
  }
  auto perm = data::seeded_permutation(full_size, seed, kAblationStream,
                                       static_cast<std::uint64_t>(multiplier));
  perm.resize(subset_size);
  return perm;
}

AggregateReport run_ablation(const ExperimentSpec& spec, const data::Dataset& full_sim,
                             std::size_t real_train_size, const SeedTrainer& trainer) {
  spec.validate();
  if (real_train_size == 0) throw ConfigError("real training split is empty");
  const int max_m = *std::max_element(spec.multipliers.begin(), spec.multipliers.end());
  if (full_sim.size() < static_cast<std::size_t>(max_m) * real_train_size) {
    throw ConfigError(fmt::format("ablation needs {} sim frames ({}x {}), only {} available",
                                  static_cast<std::size_t>(max_m) * real_train_size, max_m,
                                  real_train_size, full_sim.size()));
  }
  AggregateReport report;
  const std::uint64_t subset_seed = spec.seeds.front();
  for (Strategy s : {Strategy::kDirect, Strategy::kAda}) {
    AblationCurve curve{s, {}};
    for (int m : spec.multipliers) {
      const std::size_t n = static_cast<std::size_t>(m) * real_train_size;
      const auto subset = full_sim.subset(ablation_subset(full_sim.size(), n, m, subset_seed));
      const auto dir = spec.output_dir / "ablation" / uda::to_string(s) / fmt::format("x{}", m);
      curve.points.push_back({m, n, run_seeds(spec, s, subset, dir, trainer, real_train_size)});
    }
    report.ablation.push_back(std::move(curve));
  }

  if (!spec.output_dir.empty()) {
    const auto dir = spec.output_dir;
    fs::create_directories(dir);
    std::ostringstream csv;
    csv << "strategy,multiplier,sim_frames,seeds_ok,det_mean,det_stddev,cls_mean,cls_stddev\n";
    std::vector<Curve> det_curves, cls_curves;
    const cv::Scalar colors[] = {{200, 90, 30}, {40, 40, 220}};
    int ci = 0;
    for (const auto& c : report.ablation) {
      Curve det{uda::to_string(c.strategy), {}, {}, {}, colors[ci % 2]};
      Curve cls = det;
      for (const auto& p : c.points) {
        csv << fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", uda::to_string(c.strategy),
                           p.multiplier, p.sim_frames, p.result.det.n, p.result.det.mean,
                           p.result.det.stddev, p.result.cls.mean, p.result.cls.stddev);
        det.x.push_back(p.multiplier);
        det.mean.push_back(p.result.det.mean);
        det.stddev.push_back(p.result.det.stddev);
        cls.x.push_back(p.multiplier);
        cls.mean.push_back(p.result.cls.mean);
        cls.stddev.push_back(p.result.cls.stddev);
      }
      det_curves.push_back(det);
      cls_curves.push_back(cls);
      ++ci;
    }
    write_text(dir / "ablation.csv", csv.str());
    cv::imwrite((dir / "ablation_det.png").string(),
                plot_curves(det_curves, "Detection accuracy vs sim set size", "sim size (x real train)",
                            "Det-Acc (%)"));
    cv::imwrite((dir / "ablation_cls.png").string(),
                plot_curves(cls_curves, "Classification accuracy vs sim set size",
                            "sim size (x real train)", "Cls-Acc (%)"));
    write_report(dir, "ablation", report);
  }
  return report;
}

}  // namespace s2r::harness
