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

#include "s2r/simulanes/procedural.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <opencv2/imgproc.hpp>

#include "s2r/errors.hpp"

namespace s2r::simulanes {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

std::vector<std::string> default_map_list() {
  return {"Town01", "Town03", "Town04", "Town05", "Town07", "Town10HD"};
}

ProceduralRoad ProceduralRoad::make(const std::string& map, std::uint64_t seed,
                                    const lane::LaneClassMapping& classes) {
  std::mt19937_64 rng(fnv1a(map) ^ (seed * 0x9e3779b97f4a7c15ull));
  ProceduralRoad road;
  road.num_lanes_ = std::uniform_int_distribution<int>(2, 4)(rng);
  road.lane_width_ = uniform(rng, 3.2, 3.8);

  // Curvature: two sinusoids, |kappa| <= 1/250 m^-1.
  const double a1 = uniform(rng, -1.0, 1.0) / 400.0;
  const double a2 = uniform(rng, -1.0, 1.0) / 700.0;
  const double l1 = uniform(rng, 300.0, 700.0);
  const double l2 = uniform(rng, 120.0, 250.0);
  const double p1 = uniform(rng, 0.0, 2 * kPi);
  const double p2 = uniform(rng, 0.0, 2 * kPi);
  const double length = 4000.0;
  const std::size_t n = static_cast<std::size_t>(length / road.step_) + 1;
  road.xs_.resize(n);
  road.ys_.resize(n);
  road.yaws_.resize(n);
  double x = 0.0, y = 0.0, yaw = uniform(rng, -kPi, kPi);
  for (std::size_t k = 0; k < n; ++k) {
    road.xs_[k] = x;
    road.ys_[k] = y;
    road.yaws_[k] = yaw;
    const double s = k * road.step_;
    const double kappa = a1 * std::sin(2 * kPi * s / l1 + p1) +
                         a2 * std::sin(2 * kPi * s / l2 + p2);
    // Midpoint integration of the heading.
    const double mid_yaw = yaw + 0.5 * kappa * road.step_;
    x += road.step_ * std::cos(mid_yaw);
    y += road.step_ * std::sin(mid_yaw);
    yaw += kappa * road.step_;
  }

  // Outer edges solid (sometimes a curb), inner separators broken; two-lane
  // roads get a yellow centre line as if carrying opposing traffic.
  const int nb = road.num_lanes_ + 1;
  road.boundary_classes_.assign(nb, classes.id_of("broken_white"));
  const double edge = uniform(rng, 0.0, 1.0);
  const int edge_class = classes.id_of(edge < 0.8 ? "solid_white" : "curb");
  road.boundary_classes_.front() = edge_class;
  road.boundary_classes_.back() = edge_class;
  const char* inner[] = {"broken_white", "broken_white", "broken_broken_white",
                         "solid_broken_white", "botts_dots"};
  for (int b = 1; b + 1 < nb; ++b) {
    road.boundary_classes_[b] =
        classes.id_of(inner[std::uniform_int_distribution<int>(0, 4)(rng)]);
  }
  if (road.num_lanes_ == 2) {
    const char* centre[] = {"solid_yellow", "solid_solid_yellow", "broken_yellow",
                            "solid_broken_yellow"};
    road.boundary_classes_[1] =
        classes.id_of(centre[std::uniform_int_distribution<int>(0, 3)(rng)]);
  }
  return road;
}

double ProceduralRoad::lane_offset(int k) const noexcept {
  return ((num_lanes_ - 1) / 2.0 - k) * lane_width_;
}

double ProceduralRoad::boundary_offset(int b) const noexcept {
  return (num_lanes_ / 2.0 - b) * lane_width_;
}

Point3 ProceduralRoad::point_at(double s, double lateral) const {
  if (xs_.empty()) throw ConfigError("road not initialised");
  const double t = std::clamp(s / step_, 0.0, static_cast<double>(xs_.size() - 1));
  const std::size_t k = std::min(static_cast<std::size_t>(t), xs_.size() - 2);
  const double f = t - k;
  const double x = xs_[k] + f * (xs_[k + 1] - xs_[k]);
  const double y = ys_[k] + f * (ys_[k + 1] - ys_[k]);
  const double yaw = heading_at(s);
  return {x - lateral * std::sin(yaw), y + lateral * std::cos(yaw), 0.0};
}

double ProceduralRoad::heading_at(double s) const {
  if (yaws_.empty()) throw ConfigError("road not initialised");
  const double t = std::clamp(s / step_, 0.0, static_cast<double>(yaws_.size() - 1));
  const std::size_t k = std::min(static_cast<std::size_t>(t), yaws_.size() - 2);
  const double f = t - k;
  return yaws_[k] + f * (yaws_[k + 1] - yaws_[k]);
}

ProceduralBackend::ProceduralBackend(ProceduralOptions options,
                                     lane::LaneClassMapping classes)
    : options_(std::move(options)), classes_(std::move(classes)) {
  options_.intrinsics.validate();
}

std::vector<std::string> ProceduralBackend::available_maps() {
  auto maps = default_map_list();
  maps.insert(maps.end(), {"Town02", "Town06"});
  return maps;
}

void ProceduralBackend::load_map(const std::string& map, std::uint64_t seed) {
  const auto maps = available_maps();
  if (std::find(maps.begin(), maps.end(), map) == maps.end()) {
    throw ConfigError("map '" + map + "' is not available in the procedural backend");
  }
  map_ = map;
  map_seed_ = seed;
  road_ = ProceduralRoad::make(map, seed, classes_);
  rng_.seed(fnv1a(map) + seed);
  time_s_ = 0.0;
}

void ProceduralBackend::respawn(std::uint64_t seed) {
  std::mt19937_64 spawn_rng(seed ^ fnv1a(map_));
  s_ = uniform(spawn_rng, 50.0, road_.length() - 400.0);
  lane_ = std::uniform_int_distribution<int>(0, road_.num_lanes() - 1)(spawn_rng);
  speed_ = uniform(spawn_rng, 8.0, 15.0);
  stop_remaining_s_ = 0.0;
  wobble_phase_ = uniform(spawn_rng, 0.0, 2 * kPi);
  vehicles_.clear();
  for (int v = 0; v < options_.num_vehicles; ++v) {
    Vehicle car;
    car.lane = std::uniform_int_distribution<int>(0, road_.num_lanes() - 1)(spawn_rng);
    car.s = s_ + uniform(spawn_rng, 12.0, 90.0);
    car.speed = uniform(spawn_rng, 6.0, 16.0);
    car.color = cv::Scalar(uniform(spawn_rng, 20, 200), uniform(spawn_rng, 20, 200),
                           uniform(spawn_rng, 20, 200));
    vehicles_.push_back(car);
  }
}

double ProceduralBackend::ego_lateral() const {
  return road_.lane_offset(lane_) + 0.3 * std::sin(0.4 * time_s_ + wobble_phase_);
}

double ProceduralBackend::ego_yaw_offset() const {
  return 0.02 * std::sin(0.25 * time_s_ + 2.0 * wobble_phase_);
}

EgoState ProceduralBackend::tick(double dt) {
  if (!(dt > 0.0)) throw ConfigError("tick needs dt > 0");
  time_s_ += dt;
  if (stop_remaining_s_ > 0.0) {
    stop_remaining_s_ = std::max(0.0, stop_remaining_s_ - dt);
  } else {
    const double p_stop = 1.0 - std::exp(-options_.stop_rate_per_s * dt);
    if (uniform(rng_, 0.0, 1.0) < p_stop) stop_remaining_s_ = uniform(rng_, 2.0, 12.0);
    s_ += speed_ * dt;
  }
  // Running off the tabulated road counts as getting stuck.
  s_ = std::min(s_, road_.length() - 300.0);
  for (auto& car : vehicles_) car.s += car.speed * dt;
  return {time_s_, road_.point_at(s_, ego_lateral()),
          road_.heading_at(s_) + ego_yaw_offset()};
}

void ProceduralBackend::apply_weather(const WeatherState& weather) { weather_ = weather; }

LaneNeighbourhood ProceduralBackend::lanes_near_ego(double behind_m, double ahead_m,
                                                    double spacing_m) {
  if (!(spacing_m > 0.0)) throw ConfigError("waypoint spacing must be positive");
  LaneNeighbourhood hood;
  hood.ego_index = lane_;
  for (int k = 0; k < road_.num_lanes(); ++k) {
    LaneWaypoints lw;
    lw.width = road_.lane_width();
    lw.left_marking = road_.boundary_class(k);
    lw.right_marking = road_.boundary_class(k + 1);
    for (double s = s_ - behind_m; s <= s_ + ahead_m + 1e-9; s += spacing_m) {
      lw.centers.push_back(road_.point_at(s, road_.lane_offset(k)));
      lw.headings.push_back(road_.heading_at(s));
    }
    hood.lanes.push_back(std::move(lw));
  }
  return hood;
}

Camera ProceduralBackend::camera() {
  Camera cam;
  cam.intrinsics = options_.intrinsics;
  cam.pose.position = road_.point_at(s_, ego_lateral());
  cam.pose.position.z() = options_.mount.height_m;
  cam.pose.yaw = road_.heading_at(s_) + ego_yaw_offset();
  cam.pose.pitch = options_.mount.pitch_deg * kPi / 180.0;
  return cam;
}

namespace {

// Fills the ground quad spanned by two lateral offsets between arc lengths
// s0 and s1, if it lies in front of the camera.
void fill_strip(cv::Mat& img, const ProceduralRoad& road, const Camera& cam,
                double s0, double s1, double lat0, double lat1,
                const cv::Scalar& color) {
  const Point3 corners[4] = {road.point_at(s0, lat0), road.point_at(s0, lat1),
                             road.point_at(s1, lat1), road.point_at(s1, lat0)};
  std::vector<cv::Point> poly;
  for (const auto& c : corners) {
    auto uv = cam.project(c, 0.5);
    if (!uv) return;
    poly.emplace_back(static_cast<int>(std::clamp(uv->x(), -1e5, 1e5)),
                      static_cast<int>(std::clamp(uv->y(), -1e5, 1e5)));
  }
  cv::fillConvexPoly(img, poly, color, cv::LINE_AA);
}

struct PaintPattern {
  std::vector<double> offsets;  // relative line offsets, metres
  bool dashed_left = false;     // per line: dashed?
  bool dashed_right = false;
  bool dots = false;
  bool curb = false;
  cv::Scalar color;
};

PaintPattern pattern_for(const std::string& name) {
  PaintPattern p;
  const bool yellow = name.find("yellow") != std::string::npos;
  p.color = yellow ? cv::Scalar(40, 200, 230) : cv::Scalar(235, 235, 235);
  if (name == "botts_dots") {
    p.offsets = {0.0};
    p.dots = true;
  } else if (name == "curb") {
    p.offsets = {0.0};
    p.curb = true;
    p.color = cv::Scalar(150, 150, 150);
  } else if (name.rfind("solid_solid", 0) == 0) {
    p.offsets = {0.12, -0.12};
  } else if (name.rfind("solid_broken", 0) == 0) {
    p.offsets = {0.12, -0.12};
    p.dashed_right = true;
  } else if (name.rfind("broken_solid", 0) == 0) {
    p.offsets = {0.12, -0.12};
    p.dashed_left = true;
  } else if (name.rfind("broken_broken", 0) == 0) {
    p.offsets = {0.12, -0.12};
    p.dashed_left = p.dashed_right = true;
  } else if (name.rfind("broken", 0) == 0) {
    p.offsets = {0.0};
    p.dashed_left = true;
  } else {
    p.offsets = {0.0};
  }
  return p;
}

}  // namespace

cv::Mat ProceduralBackend::capture() {
  const auto& k = options_.intrinsics;
  const Camera cam = camera();
  std::mt19937_64 frame_rng(map_seed_ * 31 + fnv1a(map_) + frame_counter_++);

  // Daylight from sun altitude; clouds grey out the sky.
  const double daylight =
      0.3 + 0.7 * std::clamp((weather_.sun_altitude_deg + 10.0) / 40.0, 0.0, 1.0);
  const double overcast = weather_.cloudiness / 100.0;
  const cv::Scalar clear_sky(235, 200, 140), grey_sky(170, 170, 170);
  const cv::Scalar sky = (clear_sky * (1 - overcast) + grey_sky * overcast) * daylight;
  const std::uint64_t map_hash = fnv1a(map_);
  const cv::Scalar ground =
      cv::Scalar(40 + map_hash % 30, 90 + (map_hash >> 8) % 50, 60 + (map_hash >> 16) % 40) *
      daylight;
  const double wet = weather_.precipitation_deposits / 100.0;
  const cv::Scalar asphalt = cv::Scalar(95, 95, 100) * (1.0 - 0.35 * wet) * daylight;

  cv::Mat img(k.height, k.width, CV_8UC3, ground);
  const double horizon = k.cy - k.fy * std::tan(cam.pose.pitch);
  if (horizon > 0) {
    cv::rectangle(img, cv::Rect(0, 0, k.width, static_cast<int>(std::ceil(horizon))), sky,
                  cv::FILLED);
  }

  const double s_begin = s_ - 2.0;
  const double s_end = s_ + options_.render_distance_m;
  const double edge_l = road_.boundary_offset(0) + 0.6;
  const double edge_r = road_.boundary_offset(road_.num_lanes()) - 0.6;
  for (double s = s_end; s > s_begin; s -= 1.0) {
    fill_strip(img, road_, cam, s - 1.0, s, edge_l, edge_r, asphalt);
  }

  // Markings, far to near so nearer paint overdraws.
  const double paint = 0.15;
  for (int b = 0; b <= road_.num_lanes(); ++b) {
    const auto& cls = classes_.at(road_.boundary_class(b));
    const PaintPattern pat = pattern_for(cls.name);
    const cv::Scalar color = pat.color * daylight * (1.0 - 0.25 * wet);
    for (std::size_t line = 0; line < pat.offsets.size(); ++line) {
      const bool dashed = line == 0 ? pat.dashed_left : pat.dashed_right;
      const double lat = road_.boundary_offset(b) + pat.offsets[line];
      const double width = pat.curb ? 0.3 : paint;
      for (double s = s_end; s > s_begin; s -= 0.5) {
        const double a = s - 0.5;
        if (dashed && std::fmod(a, 9.0) >= 3.0) continue;
        if (pat.dots && std::fmod(a, 1.5) >= 0.25) continue;
        fill_strip(img, road_, cam, a, s, lat - width / 2, lat + width / 2, color);
      }
    }
  }

  // Vehicles as their rear faces; they occlude paint but not labels.
  std::vector<Vehicle> ordered = vehicles_;
  std::sort(ordered.begin(), ordered.end(),
            [](const Vehicle& a, const Vehicle& b) { return a.s > b.s; });
  for (const auto& car : ordered) {
    if (car.s <= s_ + 3.0 || car.s > s_end) continue;
    const double lat = road_.lane_offset(car.lane);
    const double yaw = road_.heading_at(car.s);
    const Point3 base = road_.point_at(car.s, lat);
    const Point3 side(-std::sin(yaw) * 0.9, std::cos(yaw) * 0.9, 0.0);
    const Point3 up(0, 0, 1.5);
    std::vector<cv::Point> poly;
    for (const Point3& c : {Point3(base + side), Point3(base - side), Point3(base - side + up),
                            Point3(base + side + up)}) {
      auto uv = cam.project(c, 0.5);
      if (!uv) {
        poly.clear();
        break;
      }
      poly.emplace_back(static_cast<int>(uv->x()), static_cast<int>(uv->y()));
    }
    if (!poly.empty()) cv::fillConvexPoly(img, poly, car.color * daylight, cv::LINE_AA);
  }

  // Rain streaks.
  const int streaks = static_cast<int>(weather_.precipitation * k.width / 400.0);
  for (int r = 0; r < streaks; ++r) {
    const int x = static_cast<int>(uniform(frame_rng, 0, k.width));
    const int y = static_cast<int>(uniform(frame_rng, 0, k.height));
    cv::line(img, {x, y}, {x - 2, y + k.height / 40 + 2}, cv::Scalar(200, 200, 200), 1);
  }

  cv::Mat f;
  img.convertTo(f, CV_32FC3);
  cv::Mat noise(f.size(), CV_32FC3);
  cv::theRNG().state = frame_rng();
  cv::randn(noise, cv::Scalar::all(0), cv::Scalar::all(options_.style.noise_sigma));
  f += noise;
  std::vector<cv::Mat> ch;
  cv::split(f, ch);
  for (int c = 0; c < 3; ++c) ch[c] = ch[c] * options_.style.gain[c] + options_.style.bias[c];
  cv::merge(ch, f);
  f.convertTo(img, CV_8UC3);
  return img;
}

nlohmann::json ProceduralBackend::frame_metadata() {
  const Camera cam = camera();
  nlohmann::json vehicles = nlohmann::json::array();
  for (const auto& v : vehicles_) vehicles.push_back({{"lane", v.lane}, {"s", v.s}});
  return {{"map", map_},
          {"map_seed", map_seed_},
          {"s", s_},
          {"lane", lane_},
          {"lateral", ego_lateral()},
          {"camera", cam.pose},
          {"weather", weather_},
          {"vehicles", vehicles}};
}

}  // namespace s2r::simulanes
