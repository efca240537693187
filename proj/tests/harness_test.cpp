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

#include <filesystem>
#include <fstream>
#include <set>

#include <gtest/gtest.h>
#include <opencv2/imgcodecs.hpp>

#include "s2r/errors.hpp"
#include "s2r/harness/experiment.hpp"
#include "s2r/harness/plot.hpp"
#include "s2r/harness/visualize.hpp"

namespace s2r::harness {
namespace {

namespace fs = std::filesystem;
using uda::Strategy;

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("s2r_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

data::Dataset blank(std::size_t n) {
  data::Dataset d;
  d.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.samples[i].source = std::to_string(i);
  return d;
}

SeedTrainer fixed_scores(std::map<std::uint64_t, double> det) {
  return [det](const uda::StrategyConfig&, const data::Dataset&, std::uint64_t seed, const fs::path&) {
    SeedOutcome o;
    o.ok = true;
    o.det_acc = det.at(seed);
    o.cls_acc = det.at(seed) - 10.0;
    return o;
  };
}

ExperimentSpec spec_for(std::vector<std::uint64_t> seeds, const fs::path& out = {}) {
  ExperimentSpec s;
  s.seeds = std::move(seeds);
  s.output_dir = out;
  return s;
}

TEST(Aggregate, ThreeSeedMeanAndPopulationStddev) {
  const auto r = run_experiment(spec_for({0, 1, 2}), blank(4), fixed_scores({{0, 80}, {1, 82}, {2, 84}}));
  ASSERT_EQ(r.strategies.size(), 1u);
  EXPECT_NEAR(r.strategies[0].det.mean, 82.0, 1e-12);
  EXPECT_NEAR(r.strategies[0].det.stddev, 1.63299316, 1e-6);
  EXPECT_NEAR(r.strategies[0].cls.mean, 72.0, 1e-12);
  EXPECT_EQ(r.strategies[0].det.n, 3u);
}

TEST(Aggregate, SingleSeedHasZeroSpread) {
  const auto r = run_experiment(spec_for({5}), blank(4), fixed_scores({{5, 77.5}}));
  EXPECT_DOUBLE_EQ(r.strategies[0].det.mean, 77.5);
  EXPECT_DOUBLE_EQ(r.strategies[0].det.stddev, 0.0);
}

TEST(Aggregate, FailedSeedIsRecordedAndExcluded) {
  SeedTrainer t = [](const uda::StrategyConfig&, const data::Dataset&, std::uint64_t seed,
                     const fs::path&) {
    if (seed == 1) throw LoadError("disk gone");
    SeedOutcome o;
    o.ok = true;
    o.det_acc = seed == 0 ? 60.0 : 70.0;
    return o;
  };
  const auto dir = scratch("fail");
  const auto r = run_experiment(spec_for({0, 1, 2}, dir), blank(2), t);
  const auto& s = r.strategies[0];
  EXPECT_EQ(s.failures, 1u);
  ASSERT_EQ(s.seeds.size(), 3u);
  EXPECT_FALSE(s.seeds[1].ok);
  EXPECT_NE(s.seeds[1].error.find("disk gone"), std::string::npos);
  EXPECT_DOUBLE_EQ(s.det.mean, 65.0);
  EXPECT_EQ(s.cls.n, 0u);
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  std::ifstream md(dir / "report.md");
  std::string text((std::istreambuf_iterator<char>(md)), {});
  EXPECT_NE(text.find("65.00 ± 5.00"), std::string::npos);
  EXPECT_NE(text.find("n/a"), std::string::npos);
}

TEST(Aggregate, StoredReportReaggregatesBitwise) {
  const auto dir = scratch("reagg");
  auto spec = spec_for({0, 1, 2}, dir);
  spec.strategies = {Strategy::kDirect, Strategy::kAda};
  spec.multipliers = {1, 2};
  SeedTrainer t = [](const uda::StrategyConfig& cfg, const data::Dataset& sim, std::uint64_t seed,
                     const fs::path&) {
    SeedOutcome o;
    o.ok = true;
    o.det_acc = 71.3 + 0.37 * seed + 0.011 * sim.size() + (cfg.strategy == Strategy::kAda);
    o.cls_acc = 1.0 / 3.0 + seed;
    return o;
  };
  auto r = run_experiment(spec, blank(10), t);
  r.ablation = run_ablation(spec, blank(10), 5, t).ablation;
  const std::string first = nlohmann::json(r).dump();
  const auto back = reaggregate(report_from_json(nlohmann::json::parse(first)));
  EXPECT_EQ(nlohmann::json(back).dump(), first);
}

TEST(Ablation, FivePointCurvesWithBands) {
  const auto dir = scratch("ablation");
  auto spec = spec_for({0, 1, 2}, dir);
  std::vector<std::size_t> seen;
  SeedTrainer t = [&](const uda::StrategyConfig& cfg, const data::Dataset& sim, std::uint64_t seed,
                      const fs::path&) {
    EXPECT_EQ(cfg.epoch_samples, 4u);
    seen.push_back(sim.size());
    SeedOutcome o;
    o.ok = true;
    o.det_acc = 50.0 + sim.size() + seed;
    o.cls_acc = 40.0 + sim.size();
    return o;
  };
  const auto r = run_ablation(spec, blank(25), 4, t);
  ASSERT_EQ(r.ablation.size(), 2u);
  EXPECT_EQ(r.ablation[0].strategy, Strategy::kDirect);
  EXPECT_EQ(r.ablation[1].strategy, Strategy::kAda);
  for (const auto& c : r.ablation) {
    ASSERT_EQ(c.points.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_EQ(c.points[i].multiplier, static_cast<int>(i + 1));
      EXPECT_EQ(c.points[i].sim_frames, 4 * (i + 1));
      EXPECT_NEAR(c.points[i].result.det.mean, 51.0 + 4.0 * (i + 1), 1e-12);
      EXPECT_NEAR(c.points[i].result.det.stddev, 0.81649658, 1e-6);
    }
  }
  EXPECT_EQ(seen.size(), 30u);
  for (const char* f : {"ablation.csv", "ablation.json", "ablation.md", "ablation_det.png",
                        "ablation_cls.png"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto png = cv::imread((dir / "ablation_det.png").string());
  EXPECT_EQ(png.cols, 640);
  std::ifstream csv(dir / "ablation.csv");
  int lines = 0;
  for (std::string l; std::getline(csv, l);) ++lines;
  EXPECT_EQ(lines, 11);
}

TEST(Ablation, SubsetsAreReproducibleDistinctAndIndependent) {
  const auto a = ablation_subset(100, 30, 3, 7);
  EXPECT_EQ(a, ablation_subset(100, 30, 3, 7));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 30u);
  for (auto i : a) EXPECT_LT(i, 100u);
  EXPECT_NE(a, ablation_subset(100, 30, 4, 7));
  EXPECT_NE(a, ablation_subset(100, 30, 3, 8));
}

TEST(Ablation, InsufficientSimFramesIsConfigError) {
  auto spec = spec_for({0});
  EXPECT_THROW(run_ablation(spec, blank(19), 4, fixed_scores({{0, 1}})), ConfigError);
  EXPECT_THROW(ablation_subset(10, 11, 1, 0), ConfigError);
  EXPECT_THROW(run_ablation(spec, blank(19), 0, fixed_scores({{0, 1}})), ConfigError);
}

TEST(Spec, JsonResolvesRelativePathsAndRejectsBadValues) {
  const auto j = nlohmann::json::parse(R"({
    "experiment": {"strategies": ["direct", "unit-adv"], "seeds": [3, 4],
                   "sim_manifest": "sim/manifest.json", "real_manifest": "/abs/real.json",
                   "output_dir": "out"},
    "training": {"max_epochs": 10, "warmup_epochs": 2}})");
  const auto s = experiment_spec_from_json(j, "/base");
  EXPECT_EQ(s.strategies, (std::vector<Strategy>{Strategy::kDirect, Strategy::kUnitAdv}));
  EXPECT_EQ(s.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(s.sim_manifest, fs::path("/base/sim/manifest.json"));
  EXPECT_EQ(s.real_manifest, fs::path("/abs/real.json"));
  EXPECT_EQ(s.training.max_epochs, 10);
  auto bad = j;
  bad["experiment"]["seeds"] = nlohmann::json::array();
  EXPECT_THROW(experiment_spec_from_json(bad), ConfigError);
  bad = j;
  bad["experiment"]["multipliers"] = {1, 0};
  EXPECT_THROW(experiment_spec_from_json(bad), ConfigError);
  bad = j;
  bad["experiment"]["strategies"] = {"nope"};
  EXPECT_THROW(experiment_spec_from_json(bad), ConfigError);
}

detector::FramePrediction two_lanes(lane::SuperClass first, lane::SuperClass second) {
  detector::FramePrediction p;
  p.lanes.h_samples = {40, 60, 80};
  p.lanes.lanes.resize(2);
  p.lanes.lanes[0].xs = {30, 30, 30};
  p.lanes.lanes[1].xs = {lane::kAbsent, 120, 120};
  p.classes = {first, second};
  return p;
}

cv::Vec3b at(const cv::Mat& img, int x, int y) { return img.at<cv::Vec3b>(y, x); }

TEST(Visualize, ClassColoursAtLanePoints) {
  const cv::Mat frame(90, 160, CV_8UC3, cv::Scalar(90, 90, 90));
  OverlayOptions opt;
  const auto img = visualize(frame, two_lanes(lane::SuperClass::kContinuous, lane::SuperClass::kDashed),
                             "frame", opt);
  ASSERT_EQ(img.rows, 90 + opt.banner_height);
  const int b = opt.banner_height;
  EXPECT_EQ(at(img, 30, 60 + b), cv::Vec3b(0, 0, 255));
  EXPECT_EQ(at(img, 120, 70 + b), cv::Vec3b(0, 255, 0));
  // absent row stays untouched
  EXPECT_EQ(at(img, 120, 40 + b), cv::Vec3b(90, 90, 90));
  EXPECT_EQ(at(img, 80, 60 + b), cv::Vec3b(90, 90, 90));

  const auto swapped = visualize(frame, two_lanes(lane::SuperClass::kDashed, lane::SuperClass::kContinuous),
                                 "frame", opt);
  EXPECT_EQ(at(swapped, 30, 60 + b), cv::Vec3b(0, 255, 0));
  EXPECT_EQ(at(swapped, 120, 70 + b), cv::Vec3b(0, 0, 255));
}

TEST(Visualize, EmptyPredictionLeavesFrameAndDrawsBanner) {
  cv::Mat frame(90, 160, CV_8UC3);
  cv::randu(frame, 0, 255);
  detector::FramePrediction empty;
  const auto img = visualize(frame, empty, "no lanes");
  const OverlayOptions opt;
  EXPECT_EQ(cv::norm(img.rowRange(opt.banner_height, img.rows), frame, cv::NORM_INF), 0.0);
  EXPECT_GT(cv::countNonZero(img.rowRange(0, opt.banner_height).reshape(1)), 0);
  EXPECT_THROW(visualize(cv::Mat(), empty, ""), ShapeError);
}

TEST(Plot, DrawsBandsAndHandlesFlatCurves) {
  Curve c{"direct", {1, 2, 3, 4, 5}, {50, 52, 54, 56, 58}, {2, 2, 2, 2, 2}, cv::Scalar(200, 0, 0)};
  Curve flat{"flat", {1, 2}, {10, 10}, {0, 0}, cv::Scalar(0, 0, 200)};
  const auto img = plot_curves({c}, "t", "x", "y");
  EXPECT_EQ(img.size(), cv::Size(640, 420));
  EXPECT_EQ(plot_curves({flat}, "t", "x", "y").size(), cv::Size(640, 420));
  EXPECT_EQ(plot_curves({}, "t", "x", "y").size(), cv::Size(640, 420));
}

}  // namespace
}  // namespace s2r::harness
