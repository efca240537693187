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

#include "s2r/simulanes/generator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <opencv2/imgcodecs.hpp>
#include <spdlog/spdlog.h>

#include "s2r/errors.hpp"
#include "s2r/lane/tusimple_io.hpp"
#include "s2r/simulanes/procedural.hpp"
#include "s2r/simulanes/scheduling.hpp"

namespace s2r::simulanes {

namespace fs = std::filesystem;

std::vector<int> default_h_samples(int image_height) {
  if (image_height <= 0) throw ConfigError("image height must be positive");
  std::vector<int> rows;
  for (int r = 160; r <= 710; r += 10) {
    const int scaled = static_cast<int>(std::lround(r * image_height / 720.0));
    if (rows.empty() || scaled > rows.back()) rows.push_back(std::min(scaled, image_height - 1));
  }
  return rows;
}

lane::LanePointLabel build_label(const LaneNeighbourhood& hood, const Camera& camera,
                                 std::span<const int> h_samples, int max_lanes) {
  if (max_lanes < 1 || max_lanes > 4) throw ConfigError("max_lanes must be in [1, 4]");
  lane::LanePointLabel label;
  label.h_samples.assign(h_samples.begin(), h_samples.end());

  // Boundary b of lane k: b = 0 its left, b = 1 its right.
  auto boundary_xs = [&](int k, int side, int& raw_class) {
    raw_class = lane::kUnlabelledClass;
    std::vector<double> xs(h_samples.size(), lane::kAbsent);
    if (k < 0 || k >= static_cast<int>(hood.lanes.size())) return xs;
    const auto& lw = hood.lanes[k];
    if (lw.centers.size() < 2) return xs;
    const auto sample = lane_boundaries_from_waypoints(
        lw.centers, lw.width,
        lw.headings.empty() ? std::nullopt
                            : std::optional<std::vector<double>>(lw.headings));
    raw_class = side == 0 ? lw.left_marking : lw.right_marking;
    const auto& pts = side == 0 ? sample.left : sample.right;
    return project_and_fit(pts, camera, h_samples).xs;
  };

  // Four slots LL, L, R, RR; fewer slots keep the innermost ones.
  const int e = hood.ego_index;
  const std::pair<int, int> slots4[4] = {{e - 1, 0}, {e, 0}, {e, 1}, {e + 1, 1}};
  const int first = max_lanes >= 4 ? 0 : 1;
  for (int s = first; s < first + max_lanes && s < 4; ++s) {
    lane::Lane l;
    l.xs = boundary_xs(slots4[s].first, slots4[s].second, l.raw_class);
    if (!l.present()) l.raw_class = lane::kUnlabelledClass;
    label.lanes.push_back(std::move(l));
  }
  return label;
}

namespace {

std::vector<data::Split> assign_splits(int n, const GenerationRequest& req) {
  if (req.val_fraction < 0 || req.test_fraction < 0 ||
      req.val_fraction + req.test_fraction > 1.0) {
    throw ConfigError("split fractions must be nonnegative and sum to at most 1");
  }
  const int n_test = static_cast<int>(std::lround(n * req.test_fraction));
  const int n_val = static_cast<int>(std::lround(n * req.val_fraction));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(req.seed ^ 0x5157u);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<data::Split> out(n, data::Split::kTrain);
  for (int i = 0; i < n_test && i < n; ++i) out[order[i]] = data::Split::kTest;
  for (int i = n_test; i < n_test + n_val && i < n; ++i) out[order[i]] = data::Split::kVal;
  return out;
}

}  // namespace

GenerationReport generate_dataset(SimulatorBackend& backend, const GenerationRequest& req,
                                  const lane::LaneClassMapping& classes) {
  if (req.output_dir.empty()) throw ConfigError("generation needs an output directory");
  if (!(req.tick_s > 0) || req.capture_interval_s < req.tick_s) {
    throw ConfigError("need tick_s > 0 and capture_interval_s >= tick_s");
  }
  GenerationReport report;
  report.maps = req.maps.empty() ? default_map_list() : req.maps;
  const auto available = backend.available_maps();
  for (const auto& m : report.maps) {
    if (std::find(available.begin(), available.end(), m) == available.end()) {
      throw ConfigError(fmt::format("map '{}' is not available in backend '{}'", m,
                                    backend.name()));
    }
  }
  report.frames_per_map =
      divide_frames(req.total_frames, static_cast<int>(report.maps.size()));

  fs::create_directories(req.output_dir / "images");
  const auto splits = assign_splits(req.total_frames, req);
  std::map<data::Split, std::vector<lane::LabelRecord>> records;
  std::ofstream scenes(req.output_dir / "scenes.jsonl");
  if (!scenes) throw ConfigError("cannot write to " + req.output_dir.string());

  const int ticks_per_capture =
      std::max(1, static_cast<int>(std::lround(req.capture_interval_s / req.tick_s)));
  // Bail out if a map refuses to yield frames (e.g. respawning forever).
  const int max_ticks_per_frame = 50 * ticks_per_capture;

  std::vector<int> h_samples = req.h_samples;
  std::optional<PinholeIntrinsics> intrinsics;
  int frame_index = 0;
  for (std::size_t m = 0; m < report.maps.size(); ++m) {
    const std::string& map = report.maps[m];
    std::mt19937_64 map_rng(req.seed * 1000003u + m);
    backend.load_map(map, req.seed + m);
    backend.respawn(map_rng());
    WeatherState weather = WeatherState::initial(req.weather);
    std::vector<PoseStamp> history;
    std::optional<Point3> last_saved;
    fs::create_directories(req.output_dir / "images" / map);

    for (int f = 0; f < report.frames_per_map[m]; ++f) {
      int ticks = 0;
      for (;;) {
        const EgoState ego = backend.tick(req.tick_s);
        weather = weather_step(weather, req.weather, req.tick_s, map_rng);
        history.push_back({ego.time_s, ego.position});
        ++ticks;
        if (stall_check(history, req.stall_min_displacement_m, req.stall_timeout_s) ==
                StallDecision::kRespawn ||
            ticks > max_ticks_per_frame) {
          backend.respawn(map_rng());
          history.clear();
          last_saved.reset();
          ticks = 0;
          ++report.respawns;
          spdlog::debug("{}: respawned ego at t={:.1f}s", map, ego.time_s);
          continue;
        }
        if (ticks % ticks_per_capture != 0) continue;
        if (last_saved && (ego.position - *last_saved).norm() < req.min_frame_separation_m) {
          continue;
        }
        last_saved = ego.position;
        break;
      }
      // Keep the history bounded to what the stall window needs.
      const double horizon = history.back().time_s - 2 * req.stall_timeout_s;
      history.erase(history.begin(),
                    std::find_if(history.begin(), history.end(),
                                 [&](const PoseStamp& p) { return p.time_s >= horizon; }));

      backend.apply_weather(weather);
      const Camera cam = backend.camera();
      if (!intrinsics) intrinsics = cam.intrinsics;
      if (h_samples.empty()) h_samples = default_h_samples(cam.intrinsics.height);
      const auto hood = backend.lanes_near_ego(req.waypoints_behind_m, req.waypoints_ahead_m,
                                               req.waypoint_spacing_m);
      lane::LanePointLabel label = build_label(hood, cam, h_samples, req.max_lanes);
      bool flagged = false;
      for (const auto& l : label.lanes) {
        if (!label_is_continuous(l.xs, req.max_label_dx_px)) flagged = true;
      }
      if (flagged) {
        ++report.flagged_labels;
        spdlog::warn("{} frame {}: label jumps more than {} px between rows", map, f,
                     req.max_label_dx_px);
      }
      const cv::Mat image = backend.capture();
      const std::string rel = fmt::format("images/{}/{:06d}.png", map, frame_index);
      if (!cv::imwrite((req.output_dir / rel).string(), image)) {
        throw ConfigError("failed to write " + rel);
      }
      const data::Split split = splits[frame_index];
      records[split].push_back({rel, label});
      nlohmann::json scene = backend.frame_metadata();
      scene["file"] = rel;
      scene["split"] = data::to_string(split);
      scene["map_name"] = map;
      scene["flagged"] = flagged;
      scenes << scene.dump() << '\n';
      ++frame_index;
    }
  }

  classes.save(req.output_dir / "classes.txt");
  report.manifest_path = req.output_dir / "manifest.json";
  for (auto& [split, recs] : records) {
    const std::string file = "labels_" + data::to_string(split) + ".txt";
    lane::write_label_file(req.output_dir / file, recs);
    data::DatasetManifest manifest;
    manifest.root = req.output_dir;
    manifest.split = split;
    manifest.frame_count = recs.size();
    manifest.label_files = {file};
    manifest.slot_layout = data::SlotLayout::kAsIs;
    manifest.class_mapping = "classes.txt";
    data::write_manifest(report.manifest_path, manifest);
  }

  nlohmann::json meta;
  meta["seed"] = req.seed;
  meta["backend"] = backend.name();
  meta["maps"] = report.maps;
  meta["frames_per_map"] = report.frames_per_map;
  meta["respawns"] = report.respawns;
  meta["flagged_labels"] = report.flagged_labels;
  meta["h_samples"] = h_samples;
  if (intrinsics) meta["intrinsics"] = *intrinsics;
  meta["weather"] = {{"sun_amplitude_deg", req.weather.sun_amplitude_deg},
                     {"sun_period_s", req.weather.sun_period_s},
                     {"sun_phase_rad", req.weather.sun_phase_rad},
                     {"storms", req.weather.storms_enabled},
                     {"storm_rate_per_s", req.weather.storm_rate_per_s}};
  nlohmann::json universe = nlohmann::json::array();
  for (const auto& c : classes.universe()) {
    universe.push_back({{"id", c.id}, {"name", c.name},
                        {"super_class", std::string(lane::to_string(c.super))}});
  }
  meta["class_universe"] = universe;
  std::ofstream(req.output_dir / "generation.json") << meta.dump(2) << '\n';
  spdlog::info("generated {} frames over {} maps ({} respawns)", frame_index,
               report.maps.size(), report.respawns);
  return report;
}

}  // namespace s2r::simulanes
