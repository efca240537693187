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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "s2r/errors.hpp"
#include "s2r/lane/classes.hpp"
#include "s2r/lane/labels.hpp"
#include "s2r/lane/metrics.hpp"
#include "s2r/lane/row_anchor.hpp"
#include "s2r/lane/tusimple_io.hpp"
#include "support/crafted_clip.hpp"

namespace s2r::lane {
namespace {

using oracle::crafted_clip;
using oracle::make_label;

LanePointLabel single_point_label(const RowAnchorConfig& cfg, double x) {
  LanePointLabel label;
  label.h_samples = cfg.native_h_samples();
  label.lanes.push_back(Lane{std::vector<double>(label.h_samples.size(), x), 0});
  return label;
}

// Probability volume that is one-hot at `cell` for every lane and anchor.
std::vector<double> one_hot_volume(const RowAnchorConfig& cfg, int cell) {
  const int stride = cfg.num_cells() + 1;
  std::vector<double> p(cfg.volume_size(), 0.0);
  for (int s = 0; s < cfg.num_lanes() * cfg.num_anchors(); ++s) {
    p[static_cast<std::size_t>(s) * stride + cell] = 1.0;
  }
  return p;
}

TEST(RowAnchorConfigTest, TusimpleDefaults) {
  const auto cfg = RowAnchorConfig::tusimple();
  EXPECT_EQ(cfg.num_lanes(), 4);
  EXPECT_EQ(cfg.num_anchors(), 56);
  EXPECT_EQ(cfg.num_cells(), 100);
  EXPECT_EQ(cfg.anchor_rows().front(), 64);
  EXPECT_EQ(cfg.anchor_rows().back(), 284);
  // Benchmark h_samples are 160..710 in steps of 10.
  const auto rows = cfg.native_h_samples();
  EXPECT_EQ(rows.front(), 160);
  EXPECT_EQ(rows.back(), 710);
}

TEST(RowAnchorConfigTest, RejectsInvalidGeometry) {
  EXPECT_THROW(RowAnchorConfig(0, 100, {1, 2}, {288, 800}, {720, 1280}), ConfigError);
  EXPECT_THROW(RowAnchorConfig(5, 100, {1, 2}, {288, 800}, {720, 1280}), ConfigError);
  EXPECT_THROW(RowAnchorConfig(4, 1, {1, 2}, {288, 800}, {720, 1280}), ConfigError);
  EXPECT_THROW(RowAnchorConfig(4, 100, {5}, {288, 800}, {720, 1280}), ConfigError);
  EXPECT_THROW(RowAnchorConfig(4, 100, {5, 5}, {288, 800}, {720, 1280}), ConfigError);
  EXPECT_THROW(RowAnchorConfig(4, 100, {5, 288}, {288, 800}, {720, 1280}), ConfigError);
}

TEST(RowAnchorConfigTest, JsonRoundTrip) {
  const auto cfg = RowAnchorConfig::tusimple();
  nlohmann::json j = cfg;
  EXPECT_EQ(row_anchor_config_from_json(j), cfg);
}

TEST(EncodeTargetsTest, LeftEdgeIsCellZero) {
  const auto cfg = RowAnchorConfig::tusimple();
  const auto grid = encode_targets(single_point_label(cfg, 0.0), cfg);
  for (int j = 0; j < cfg.num_anchors(); ++j) EXPECT_EQ(grid.at(0, j), 0);
  EXPECT_TRUE(grid.present[0]);
}

TEST(EncodeTargetsTest, AbsentLaneMapsToNoLaneCell) {
  const auto cfg = RowAnchorConfig::tusimple();
  const auto grid = encode_targets(single_point_label(cfg, kAbsent), cfg);
  for (int i = 0; i < cfg.num_lanes(); ++i) {
    for (int j = 0; j < cfg.num_anchors(); ++j) EXPECT_EQ(grid.at(i, j), 100);
    EXPECT_FALSE(grid.present[i]);
  }
}

TEST(EncodeTargetsTest, CentreColumnMatchesQuantizationOracle) {
  const auto cfg = RowAnchorConfig::tusimple();
  // Oracle: scale 1280 -> 800, divide by the 8 px cell width, floor.
  const double scaled = 640.0 * 800.0 / 1280.0;
  const int expected = static_cast<int>(std::floor(scaled / (800.0 / 100.0)));
  ASSERT_EQ(expected, 50);
  const auto grid = encode_targets(single_point_label(cfg, 640.0), cfg);
  EXPECT_EQ(grid.at(0, 0), expected);
}

TEST(EncodeTargetsTest, IncompatibleRowsAreConfigurationError) {
  const auto cfg = RowAnchorConfig::tusimple();
  LanePointLabel label;
  label.h_samples = {100, 200, 300};
  label.lanes.push_back(Lane{{1.0, 2.0, 3.0}, 0});
  EXPECT_THROW(encode_targets(label, cfg), ConfigError);
}

TEST(EncodeTargetsTest, ClassTargetsUseMapping) {
  const auto cfg = RowAnchorConfig::tusimple();
  const auto mapping = LaneClassMapping::simulanes_default();
  auto label = single_point_label(cfg, 300.0);
  label.lanes[0].raw_class = mapping.id_of("solid_broken_white");
  label.lanes.push_back(Lane{std::vector<double>(label.h_samples.size(), 500.0),
                             mapping.id_of("broken_white")});
  const auto grid = encode_targets(label, cfg, &mapping);
  EXPECT_EQ(grid.lane_class[0], static_cast<int>(SuperClass::kContinuous));
  EXPECT_EQ(grid.lane_class[1], static_cast<int>(SuperClass::kDashed));
  EXPECT_EQ(grid.lane_class[2], -1);
}

TEST(DecodePredictionTest, NoLaneCellEverywhereMeansAllAbsent) {
  const auto cfg = RowAnchorConfig::tusimple();
  const auto label = decode_prediction(one_hot_volume(cfg, cfg.num_cells()), cfg);
  ASSERT_EQ(label.lanes.size(), 4u);
  for (const auto& lane : label.lanes) EXPECT_FALSE(lane.present());
}

TEST(DecodePredictionTest, OneHotDecodesToCellCentre) {
  const auto cfg = RowAnchorConfig::tusimple();
  const int k = 37;
  const auto label = decode_prediction(one_hot_volume(cfg, k), cfg);
  const double centre_native = (k + 0.5) * 8.0 * 1280.0 / 800.0;
  for (const auto& lane : label.lanes) {
    for (double x : lane.xs) EXPECT_NEAR(x, centre_native, 1e-9);
  }
}

TEST(DecodePredictionTest, TwoCellMixtureDecodesToMiddleCell) {
  const auto cfg = RowAnchorConfig::tusimple();
  const int stride = cfg.num_cells() + 1;
  std::vector<double> p(cfg.volume_size(), 0.0);
  for (int s = 0; s < cfg.num_lanes() * cfg.num_anchors(); ++s) {
    p[static_cast<std::size_t>(s) * stride + 10] = 0.5;
    p[static_cast<std::size_t>(s) * stride + 12] = 0.5;
  }
  const auto label = decode_prediction(p, cfg);
  // By hand: 0.5 * 10.5 + 0.5 * 12.5 = 11.5 cells.
  const double expected = 11.5 * 8.0 * 1.6;
  EXPECT_NEAR(label.lanes[2].xs[5], expected, 1e-9);

  const auto argmax = decode_prediction(p, cfg, DecodeMode::kArgmax);
  EXPECT_NEAR(argmax.lanes[2].xs[5], 10.5 * 8.0 * 1.6, 1e-9);
}

TEST(DecodePredictionTest, RejectsUnnormalizedSlices) {
  const auto cfg = RowAnchorConfig::tusimple();
  auto p = one_hot_volume(cfg, 3);
  p[3] = 0.9;
  EXPECT_THROW(decode_prediction(p, cfg), ValidationError);
  p[3] = 1.0;
  p[4] = -0.0001;
  EXPECT_THROW(decode_prediction(p, cfg), ValidationError);
  p.pop_back();
  EXPECT_THROW(decode_prediction(p, cfg), ShapeError);
}

TEST(DecodePredictionTest, RoundTripWithinHalfCell) {
  const auto cfg = RowAnchorConfig::tusimple();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xdist(0.0, 1279.999);
  std::bernoulli_distribution absent(0.2);
  const double half_cell_native = 0.5 * cfg.cell_width() * 1280.0 / 800.0;
  for (int trial = 0; trial < 50; ++trial) {
    LanePointLabel label;
    label.h_samples = cfg.native_h_samples();
    for (int i = 0; i < cfg.num_lanes(); ++i) {
      Lane lane;
      for (std::size_t r = 0; r < label.h_samples.size(); ++r) {
        lane.xs.push_back(absent(rng) ? kAbsent : xdist(rng));
      }
      label.lanes.push_back(std::move(lane));
    }
    const auto grid = encode_targets(label, cfg);
    std::vector<double> p(cfg.volume_size(), 0.0);
    const int stride = cfg.num_cells() + 1;
    for (int s = 0; s < cfg.num_lanes() * cfg.num_anchors(); ++s) {
      p[static_cast<std::size_t>(s) * stride + grid.cells[s]] = 1.0;
    }
    const auto decoded = decode_prediction(p, cfg);
    for (int i = 0; i < cfg.num_lanes(); ++i) {
      for (std::size_t r = 0; r < label.h_samples.size(); ++r) {
        const double x = label.lanes[i].xs[r];
        if (x < 0) {
          EXPECT_EQ(decoded.lanes[i].xs[r], kAbsent);
        } else {
          EXPECT_LE(std::abs(decoded.lanes[i].xs[r] - x), half_cell_native + 1e-9);
        }
      }
    }
  }
}

TEST(DecodeClassesTest, Argmax) {
  const std::vector<double> logits = {2.0, 1.0, -1.0, 3.0};
  const auto c = decode_classes(logits, 2);
  EXPECT_EQ(c[0], SuperClass::kDashed);
  EXPECT_EQ(c[1], SuperClass::kContinuous);
}

TEST(AssignLaneSlotsTest, OrdersAroundCentre) {
  LanePointLabel label;
  label.h_samples = {10, 20};
  label.lanes = {Lane{{900, 950}, 1}, Lane{{100, 50}, 2}, Lane{{500, 560}, 3},
                 Lane{{-2, -2}, 4}, Lane{{300, 350}, 5}, Lane{{1200, 1250}, 6}};
  const auto out = assign_lane_slots(label, 4, 1280);
  ASSERT_EQ(out.lanes.size(), 4u);
  EXPECT_EQ(out.lanes[0].raw_class, 5);  // second left
  EXPECT_EQ(out.lanes[1].raw_class, 3);  // ego left
  EXPECT_EQ(out.lanes[2].raw_class, 1);  // ego right
  EXPECT_EQ(out.lanes[3].raw_class, 6);  // second right
}

TEST(LaneClassMappingTest, BenchmarkExamples) {
  const auto m = LaneClassMapping::simulanes_default();
  EXPECT_EQ(map_lane_class(m.id_of("broken_white"), m), SuperClass::kDashed);
  EXPECT_EQ(map_lane_class(m.id_of("solid_broken_white"), m), SuperClass::kContinuous);
  EXPECT_EQ(map_lane_class(m.id_of("broken_solid_yellow"), m), SuperClass::kContinuous);
  const auto t = LaneClassMapping::tusimple_default();
  EXPECT_EQ(t.map(t.id_of("single_white_dashed")), SuperClass::kDashed);
}

TEST(LaneClassMappingTest, TotalOverFifteenIds) {
  const auto m = LaneClassMapping::simulanes_default();
  ASSERT_EQ(m.universe().size(), 15u);
  for (int id = 0; id < 15; ++id) {
    EXPECT_TRUE(m.contains(id));
    EXPECT_NO_THROW(m.map(id));
  }
}

TEST(LaneClassMappingTest, IdempotentOnSuperClasses) {
  const auto m = LaneClassMapping::simulanes_default();
  for (const auto& c : m.universe()) {
    const SuperClass once = m.map(c.id);
    EXPECT_EQ(m.map(m.canonical_raw(once)), once);
  }
}

TEST(LaneClassMappingTest, UnknownIdNamesTheId) {
  const auto m = LaneClassMapping::simulanes_default();
  try {
    m.map(42);
    FAIL() << "expected MappingError";
  } catch (const MappingError& e) {
    EXPECT_EQ(e.raw_id(), 42);
    EXPECT_NE(std::string(e.what()).find("42"), std::string::npos);
  }
}

TEST(LaneClassMappingTest, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "s2r_classes.txt";
  const auto m = LaneClassMapping::simulanes_default();
  m.save(path);
  const auto loaded = LaneClassMapping::from_file(path);
  ASSERT_EQ(loaded.universe().size(), m.universe().size());
  for (const auto& c : m.universe()) EXPECT_EQ(loaded.map(c.id), c.super);
  std::filesystem::remove(path);
}

TEST(LaneClassMappingTest, ShippedFilesMatchDefaults) {
  const std::filesystem::path dir = S2R_SOURCE_DIR "/data/classes";
  for (const auto& [file, m] : {std::pair{"simulanes.txt", LaneClassMapping::simulanes_default()},
                                std::pair{"tusimple.txt", LaneClassMapping::tusimple_default()}}) {
    const auto loaded = LaneClassMapping::from_file(dir / file);
    ASSERT_EQ(loaded.universe().size(), m.universe().size()) << file;
    for (const auto& c : m.universe()) {
      EXPECT_EQ(loaded.at(c.id).name, c.name) << file;
      EXPECT_EQ(loaded.map(c.id), c.super) << file;
    }
  }
}

TEST(TusimpleAccuracyTest, PerfectPrediction) {
  const auto gt = make_label({10, 20, 30}, {{100, 110, 120}, {500, -2, 520}});
  std::vector<LanePointLabel> gts = {gt}, preds = {gt};
  EXPECT_DOUBLE_EQ(tusimple_accuracy(preds, gts), 1.0);
}

TEST(TusimpleAccuracyTest, OffsetByTwiceThresholdScoresZero) {
  const double thr = 20.0;
  const auto gt = make_label({10, 20, 30}, {{100, 110, 120}, {500, 510, 520}});
  auto pred = gt;
  for (auto& lane : pred.lanes) {
    for (auto& x : lane.xs) x += 2 * thr;
  }
  std::vector<LanePointLabel> gts = {gt}, preds = {pred};
  EXPECT_DOUBLE_EQ(tusimple_accuracy(preds, gts, thr), 0.0);
}

TEST(TusimpleAccuracyTest, CraftedClipIsOneHalf) {
  const auto c = crafted_clip();
  MetricAccumulator acc(20.0);
  for (std::size_t k = 0; k < c.gts.size(); ++k) acc.add(c.preds[k], c.gts[k]);
  EXPECT_EQ(acc.correct(), 6u);
  EXPECT_EQ(acc.total(), 12u);
  EXPECT_DOUBLE_EQ(acc.accuracy(), 0.5);
}

TEST(TusimpleAccuracyTest, EmptyGroundTruthIsUndefined) {
  const auto gt = make_label({10, 20}, {{-2, -2}});
  std::vector<LanePointLabel> gts = {gt}, preds = {gt};
  EXPECT_THROW(tusimple_accuracy(preds, gts), UndefinedMetricError);
  std::vector<LanePointLabel> none;
  EXPECT_THROW(tusimple_accuracy(none, none), UndefinedMetricError);
}

TEST(TusimpleAccuracyTest, RejectsMismatchedRowsAndThreshold) {
  const auto gt = make_label({10, 20}, {{1, 2}});
  const auto pred = make_label({10, 30}, {{1, 2}});
  EXPECT_THROW(score_frame(pred, gt), ValidationError);
  EXPECT_THROW(score_frame(gt, gt, 0.0), ConfigError);
}

TEST(TusimpleAccuracyTest, MatchingIsOneToOne) {
  // One predicted lane sits on both ground-truth lanes' region; it may only
  // be credited once.
  const auto gt = make_label({10, 20}, {{100, 100}, {110, 110}});
  const auto pred = make_label({10, 20}, {{105, 105}});
  const auto t = score_frame(pred, gt);
  EXPECT_EQ(t.correct, 2u);
  EXPECT_EQ(t.total, 4u);
}

TEST(TusimpleAccuracyTest, MonotoneAndPermutationInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xdist(0.0, 1000.0);
  std::uniform_real_distribution<double> noise(-60.0, 60.0);
  const std::vector<int> rows = {10, 20, 30, 40, 50};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<LanePointLabel> gts, preds;
    for (int f = 0; f < 4; ++f) {
      std::vector<std::vector<double>> g(3), p(3);
      for (int i = 0; i < 3; ++i) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
          const double x = xdist(rng);
          g[i].push_back(x);
          p[i].push_back(std::clamp(x + noise(rng), 0.0, 1279.0));
        }
      }
      gts.push_back(make_label(rows, g));
      preds.push_back(make_label(rows, p));
    }
    const double base = tusimple_accuracy(preds, gts);
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, 1.0);

    auto pg = gts;
    auto pp = preds;
    std::reverse(pg.begin(), pg.end());
    std::reverse(pp.begin(), pp.end());
    EXPECT_DOUBLE_EQ(tusimple_accuracy(pp, pg), base);

    // Fix one wrong point: accuracy must not drop.
    bool fixed = false;
    for (std::size_t f = 0; f < preds.size() && !fixed; ++f) {
      for (int i = 0; i < 3 && !fixed; ++i) {
        for (std::size_t r = 0; r < rows.size() && !fixed; ++r) {
          if (std::abs(preds[f].lanes[i].xs[r] - gts[f].lanes[i].xs[r]) >= 20.0) {
            preds[f].lanes[i].xs[r] = gts[f].lanes[i].xs[r];
            fixed = true;
          }
        }
      }
    }
    EXPECT_GE(tusimple_accuracy(preds, gts), base);
  }
}

TEST(ClassificationAccuracyTest, Examples) {
  using enum SuperClass;
  const std::vector<std::optional<SuperClass>> gt = {kDashed, kContinuous, kDashed,
                                                     kContinuous};
  const std::vector<SuperClass> all = {kDashed, kContinuous, kDashed, kContinuous};
  const std::vector<SuperClass> flipped = {kContinuous, kDashed, kContinuous, kDashed};
  const std::vector<SuperClass> three = {kDashed, kContinuous, kDashed, kDashed};
  EXPECT_DOUBLE_EQ(classification_accuracy(all, gt), 1.0);
  EXPECT_DOUBLE_EQ(classification_accuracy(flipped, gt), 0.0);
  EXPECT_DOUBLE_EQ(classification_accuracy(three, gt), 0.75);
}

TEST(ClassificationAccuracyTest, AbsentLanesSkippedAndEmptyUndefined) {
  using enum SuperClass;
  const std::vector<std::optional<SuperClass>> gt = {kDashed, std::nullopt};
  const std::vector<SuperClass> pred = {kDashed, kContinuous};
  EXPECT_DOUBLE_EQ(classification_accuracy(pred, gt), 1.0);
  const std::vector<std::optional<SuperClass>> none = {std::nullopt, std::nullopt};
  EXPECT_THROW(classification_accuracy(pred, none), UndefinedMetricError);
}

TEST(TusimpleIoTest, ParsesAndFormatsRecords) {
  const std::string line =
      R"({"lanes": [[-2, 10, 20], [5, 6, 7]], "h_samples": [160, 170, 180], )"
      R"("raw_file": "clips/a/1.jpg", "classes": [2, 0]})";
  const auto rec = parse_label_record(line, 1);
  ASSERT_TRUE(rec.label);
  EXPECT_EQ(rec.raw_file, "clips/a/1.jpg");
  EXPECT_EQ(rec.label->lanes.size(), 2u);
  EXPECT_EQ(rec.label->lanes[0].raw_class, 2);
  EXPECT_FALSE(rec.label->lanes[0].xs[0] >= 0);

  const auto again = parse_label_record(format_label_record(rec), 1);
  EXPECT_EQ(again.label->lanes[1].xs, rec.label->lanes[1].xs);
  EXPECT_EQ(again.label->h_samples, rec.label->h_samples);

  const auto unlabelled = parse_label_record(R"({"raw_file": "x.png"})", 3);
  EXPECT_FALSE(unlabelled.label);
}

TEST(TusimpleIoTest, LengthMismatchIsParseErrorWithLine) {
  const std::string bad =
      R"({"lanes": [[1, 2]], "h_samples": [160, 170, 180], "raw_file": "a.jpg"})";
  try {
    parse_label_record(bad, 17);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 17u);
  }
  EXPECT_THROW(parse_label_record("{not json", 2), ParseError);
}

}  // namespace
}  // namespace s2r::lane
